# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for the reference."""

import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, fmax, INFINITY, fabs

cnp.import_array()

CONVENTIONAL = 0
NC_ZERO_PAD = 1
NC_PARTITION = 2


def hop_matrix(Py_ssize_t n, indptr, indices):
    cdef const cnp.int64_t[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const cnp.int64_t[:] ix = np.ascontiguousarray(indices, dtype=np.int64)
    out_arr = np.full((n, n), -1, dtype=np.int64)
    cdef cnp.int64_t[:, :] out = out_arr
    cdef cnp.int64_t[:] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t src, head, tail, u, v, j
    cdef cnp.int64_t du
    for src in range(n):
        out[src, src] = 0
        queue[0] = src
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = out[src, u] + 1
            for j in range(ip[u], ip[u + 1]):
                v = ix[j]
                if out[src, v] < 0:
                    out[src, v] = du
                    queue[tail] = v
                    tail += 1
    return out_arr


cdef double _combo_power(
    const cnp.int64_t[:] choice, const cnp.int64_t[:] cand_ptr,
    const cnp.int64_t[:] link_ptr, const cnp.int64_t[:] link_ids,
    const cnp.int64_t[:] tri_ptr, const cnp.int64_t[:] tri_ids, const cnp.int64_t[:] tri_dir,
    const cnp.int64_t[:] end_src, const cnp.int64_t[:] end_dst,
    const double[:] lam_f, const double[:] lam_r, const cnp.int64_t[:] rev_link,
    const double[:] edfa, Py_ssize_t n_links, Py_ssize_t n_triples,
    int mode, double pp, double px, double pt, double pe, double B, double W, double const_w,
    double[:] w, double[:] added, double[:] dropped, double[:] tf, double[:] tr,
) noexcept nogil:
    cdef Py_ssize_t p, c, j, e, t
    cdef double lf, lr, a, b, hi, lo, we
    cdef double offered = 0.0, end_ports = 0.0, load = 0.0, edfa_w = 0.0
    cdef double ports, trans
    for e in range(n_links):
        w[e] = 0.0
        added[e] = 0.0
        dropped[e] = 0.0
    for t in range(n_triples):
        tf[t] = 0.0
        tr[t] = 0.0
    for p in range(choice.shape[0]):
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
    for e in range(n_links):
        we = w[e]
        load += we
        if we > 0.0:
            edfa_w += pe * edfa[e] * fmax(1.0, ceil(we / B / W - 1e-12))
        a = added[e]
        b = dropped[e]
        end_ports += a if a > b else b
    if mode == 0:
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
            if mode == 1:
                ports += px * hi
            else:
                ports += px * lo + pp * (hi - lo)
            trans += pt * hi
    return (ports + trans) / B + edfa_w + const_w


def _i64(x):
    return np.ascontiguousarray(x, dtype=np.int64)


def _f64(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def combo_power(
    choice, cand_ptr, link_ptr, link_ids, tri_ptr, tri_ids, tri_dir,
    end_src, end_dst, lam_f, lam_r, rev_link, edfa, n_links, n_triples,
    mode, pp, px, pt, pe, B, W, const_w,
):
    nl = max(int(n_links), 1)
    nt = max(int(n_triples), 1)
    return _combo_power(
        _i64(choice), _i64(cand_ptr), _i64(link_ptr), _i64(link_ids),
        _i64(tri_ptr), _i64(tri_ids), _i64(tri_dir), _i64(end_src), _i64(end_dst),
        _f64(lam_f), _f64(lam_r), _i64(rev_link), _f64(edfa), n_links, n_triples,
        mode, pp, px, pt, pe, B, W, const_w,
        np.zeros(nl), np.zeros(nl), np.zeros(nl), np.zeros(nt), np.zeros(nt),
    )


def enumerate_best(
    cand_count, cand_ptr, link_ptr, link_ids, tri_ptr, tri_ids, tri_dir,
    end_src, end_dst, lam_f, lam_r, rev_link, edfa, n_links, n_triples,
    mode, pp, px, pt, pe, B, W, const_w,
):
    cdef const cnp.int64_t[:] counts = _i64(cand_count)
    cdef const cnp.int64_t[:] cptr = _i64(cand_ptr)
    cdef const cnp.int64_t[:] lptr = _i64(link_ptr)
    cdef const cnp.int64_t[:] lids = _i64(link_ids)
    cdef const cnp.int64_t[:] tptr = _i64(tri_ptr)
    cdef const cnp.int64_t[:] tids = _i64(tri_ids)
    cdef const cnp.int64_t[:] tdir = _i64(tri_dir)
    cdef const cnp.int64_t[:] esrc = _i64(end_src)
    cdef const cnp.int64_t[:] edst = _i64(end_dst)
    cdef const double[:] lf = _f64(lam_f)
    cdef const double[:] lr = _f64(lam_r)
    cdef const cnp.int64_t[:] rev = _i64(rev_link)
    cdef const double[:] ed = _f64(edfa)
    cdef Py_ssize_t nl = n_links, nt = n_triples
    cdef Py_ssize_t n_pairs = counts.shape[0]
    choice_arr = np.zeros(n_pairs, dtype=np.int64)
    best_arr = np.zeros(n_pairs, dtype=np.int64)
    cdef cnp.int64_t[:] choice = choice_arr
    cdef cnp.int64_t[:] best_choice = best_arr
    cdef double[:] w = np.zeros(max(nl, 1))
    cdef double[:] added = np.zeros(max(nl, 1))
    cdef double[:] dropped = np.zeros(max(nl, 1))
    cdef double[:] tf = np.zeros(max(nt, 1))
    cdef double[:] tr = np.zeros(max(nt, 1))
    cdef int cmode = mode
    cdef double cpp = pp, cpx = px, cpt = pt, cpe = pe, cB = B, cW = W, cc = const_w
    cdef double best = INFINITY, val
    cdef long long evaluated = 0
    cdef Py_ssize_t i, k
    with nogil:
        while True:
            val = _combo_power(choice, cptr, lptr, lids, tptr, tids, tdir, esrc, edst,
                               lf, lr, rev, ed, nl, nt, cmode, cpp, cpx, cpt, cpe, cB, cW, cc,
                               w, added, dropped, tf, tr)
            evaluated += 1
            if val < best - 1e-12 * (fabs(best) if best < INFINITY else 0.0):
                best = val
                for k in range(n_pairs):
                    best_choice[k] = choice[k]
            i = n_pairs - 1
            while i >= 0:
                choice[i] += 1
                if choice[i] < counts[i]:
                    break
                choice[i] = 0
                i -= 1
            if i < 0:
                break
    return best, best_arr, evaluated
