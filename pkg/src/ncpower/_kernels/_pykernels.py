"""Pure-Python implementations of the hot kernels.

These mirror ``_ckernels.pyx`` one-for-one and are used whenever the
compiled extension is unavailable (or ``NCPOWER_PURE=1`` is set).
"""

import math
from collections import deque

import numpy as np

# scheme/mode codes shared with the compiled kernels
CONVENTIONAL = 0
NC_ZERO_PAD = 1
NC_PARTITION = 2


def hop_matrix(n, indptr, indices):
    """All-pairs unweighted shortest-path hop counts by BFS from every node.

    Nodes are 0-based here; unreachable pairs are reported as -1.
    """
    out = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        row = out[src]
        row[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            du = row[u] + 1
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if row[v] < 0:
                    row[v] = du
                    queue.append(v)
    return out


def combo_power(
    choice, cand_ptr, link_ptr, link_ids, tri_ptr, tri_ids, tri_dir,
    end_src, end_dst, lam_f, lam_r, rev_link, edfa, n_links, n_triples,
    mode, pp, px, pt, pe, B, W, const_w,
):
    """Non-bypass network power for one path choice per demand pair.

    Candidate ``c`` of pair ``p`` (s < d) lists the directed link ids of
    its s->d path, the coding triples it crosses (``tri_dir`` +1 when the
    s->d direction runs from the smaller to the larger neighbour) and the
    directed links leaving s and leaving d.
    """
    w = [0.0] * n_links
    added = [0.0] * n_links
    dropped = [0.0] * n_links
    tf = [0.0] * n_triples
    tr = [0.0] * n_triples
    offered = 0.0
    for p in range(len(choice)):
        c = cand_ptr[p] + choice[p]
        lf = lam_f[p]
        lr = lam_r[p]
        offered += lf + lr
        for j in range(link_ptr[c], link_ptr[c + 1]):
            e = link_ids[j]
            w[e] += lf
            w[rev_link[e]] += lr
        e = end_src[c]
        added[e] += lf
        dropped[e] += lr
        e = end_dst[c]
        added[e] += lr
        dropped[e] += lf
        for j in range(tri_ptr[c], tri_ptr[c + 1]):
            t = tri_ids[j]
            if tri_dir[j] > 0:
                tf[t] += lf
                tr[t] += lr
            else:
                tf[t] += lr
                tr[t] += lf

    end_ports = 0.0
    load = 0.0
    edfa_w = 0.0
    for e in range(n_links):
        we = w[e]
        load += we
        if we > 0.0:
            edfa_w += pe * edfa[e] * max(1.0, math.ceil(we / B / W - 1e-12))
        a = added[e]
        b = dropped[e]
        end_ports += a if a > b else b
    if mode == CONVENTIONAL:
        # each transit hop costs one port in total, half on each side
        ports = pp * (end_ports + load - offered)
        trans = pt * load
    else:
        ports = pp * end_ports
        trans = pt * offered
        for t in range(n_triples):
            a = tf[t]
            b = tr[t]
            hi = a if a > b else b
            lo = b if a > b else a
            if mode == NC_ZERO_PAD:
                ports += px * hi
                trans += pt * hi
            else:
                ports += px * lo + pp * (hi - lo)
                trans += pt * hi
    return (ports + trans) / B + edfa_w + const_w


def enumerate_best(
    cand_count, cand_ptr, link_ptr, link_ids, tri_ptr, tri_ids, tri_dir,
    end_src, end_dst, lam_f, lam_r, rev_link, edfa, n_links, n_triples,
    mode, pp, px, pt, pe, B, W, const_w,
):
    """Odometer enumeration over one candidate path per demand pair.

    Returns ``(best_power, best_choice, combos_evaluated)``. Ties keep the
    first combination met in odometer order, which is lexicographic in the
    candidate indices.
    """
    n_pairs = len(cand_count)
    choice = [0] * n_pairs
    best = math.inf
    best_choice = list(choice)
    evaluated = 0
    while True:
        val = combo_power(
            choice, cand_ptr, link_ptr, link_ids, tri_ptr, tri_ids, tri_dir,
            end_src, end_dst, lam_f, lam_r, rev_link, edfa, n_links, n_triples,
            mode, pp, px, pt, pe, B, W, const_w,
        )
        evaluated += 1
        if val < best - 1e-12 * abs(best if best < math.inf else 0.0):
            best = val
            best_choice = list(choice)
        i = n_pairs - 1
        while i >= 0:
            choice[i] += 1
            if choice[i] < cand_count[i]:
                break
            choice[i] = 0
            i -= 1
        if i < 0:
            break
    return best, np.asarray(best_choice, dtype=np.int64), evaluated
