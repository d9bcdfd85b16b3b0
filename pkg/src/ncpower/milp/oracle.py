"""Exhaustive search over path choices on tiny instances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ncpower import _kernels
from ncpower.errors import InstanceTooLargeError, ParameterError
from ncpower.milp.model import mode_parts
from ncpower.netmodel import Topology, edfa_count
from ncpower.power import DeviceParams, network_power
from ncpower.routing import RoutePlan, min_hop_tree, plan_from_paths
from ncpower.traffic import DemandMatrix

MAX_NODES = 6
DEFAULT_GUARD = 10**6

_MODE_CODE = {
    "conventional": _kernels.CONVENTIONAL,
    "nc_zero_pad": _kernels.NC_ZERO_PAD,
    "nc_partition": _kernels.NC_PARTITION,
}


def simple_paths(t: Topology, s: int, d: int) -> list[tuple[int, ...]]:
    """All simple s-d paths, ordered by (hops, km, node sequence)."""
    out = []
    stack = [(s, (s,))]
    while stack:
        u, path = stack.pop()
        if u == d:
            out.append(path)
            continue
        for v in t.neighbors(u):
            if v not in path:
                stack.append((v, path + (v,)))
    km = lambda p: sum(t.length(a, b) for a, b in zip(p, p[1:]))  # noqa: E731
    return sorted(out, key=lambda p: (len(p), km(p), p))


@dataclass(frozen=True)
class OracleResult:
    power_W: float
    plan: RoutePlan
    combinations: int


@dataclass
class _Arrays:
    pairs: list[tuple[int, int]]
    cands: list[list[tuple[int, ...]]]
    kernel_args: tuple


def _flatten(t: Topology, dm: DemandMatrix, guard: int) -> _Arrays:
    links = t.directed_links()
    lid = {e: i for i, e in enumerate(links)}
    rev = np.array([lid[(b, a)] for a, b in links], dtype=np.int64)
    tri_id: dict[tuple[int, int, int], int] = {}
    for m in range(1, t.n + 1):
        nb = t.neighbors(m)
        for i, n in enumerate(nb):
            for k in nb[i + 1:]:
                tri_id[(n, m, k)] = len(tri_id)

    pairs, cands = [], []
    total = 1
    for s in range(1, t.n + 1):
        for d in range(s + 1, t.n + 1):
            if dm[s, d] == 0 and dm[d, s] == 0:
                continue
            ps = simple_paths(t, s, d)
            total *= len(ps)
            if total > guard:
                raise InstanceTooLargeError(
                    f"more than {guard} path combinations; refusing to enumerate")
            pairs.append((s, d))
            cands.append(ps)

    counts, cptr, lptr, lids, tptr, tids, tdir, esrc, edst = [], [0], [0], [], [0], [], [], [], []
    for ps in cands:
        counts.append(len(ps))
        cptr.append(cptr[-1] + len(ps))
        for p in ps:
            lids += [lid[e] for e in zip(p, p[1:])]
            lptr.append(len(lids))
            for n, m, k in zip(p, p[1:], p[2:]):
                tids.append(tri_id[(min(n, k), m, max(n, k))])
                tdir.append(1 if n < k else -1)
            tptr.append(len(tids))
            esrc.append(lid[(p[0], p[1])])
            edst.append(lid[(p[-1], p[-2])])
    i64 = lambda x: np.asarray(x, dtype=np.int64)  # noqa: E731
    lam_f = np.array([dm[s, d] for s, d in pairs], dtype=float)
    lam_r = np.array([dm[d, s] for s, d in pairs], dtype=float)
    args = (i64(counts), i64(cptr[:-1]), i64(lptr), i64(lids), i64(tptr), i64(tids), i64(tdir),
            i64(esrc), i64(edst), lam_f, lam_r, rev)
    return _Arrays(pairs, cands, (args, len(links), len(tri_id)))


def brute_force_optimum(
    t: Topology,
    dm: DemandMatrix,
    p: DeviceParams,
    mode: str = "nc_zero_pad",
    guard: int = DEFAULT_GUARD,
) -> OracleResult:
    """Cheapest reverse-pinned single-path routing, by trying every combination.

    Ties go to the combination whose per-pair candidate indices are
    lexicographically smallest; candidate 0 is always the min-hop path the
    heuristic picks, so the heuristic wins any tie.
    """
    scheme, nc_mode = mode_parts(mode)
    if t.n > MAX_NODES:
        raise InstanceTooLargeError(f"exhaustive search is limited to {MAX_NODES} nodes, got {t.n}")
    if dm.n != t.n:
        raise ParameterError(f"demand matrix is {dm.n}x{dm.n} but topology has {t.n} nodes")
    arr = _flatten(t, dm, guard)
    args, n_links, n_tri = arr.kernel_args
    edfa = np.array([edfa_count(t.length(a, b), p.S) for a, b in t.directed_links()], dtype=float)
    const = (p.Po + p.Pmd) * t.n
    if arr.pairs:
        best, choice, evaluated = _kernels.enumerate_best(
            *args[:12], edfa, n_links, n_tri, _MODE_CODE[mode],
            p.Pp, p.Px, p.Pt, p.Pe, p.B, float(p.W), const,
        )
    else:
        choice, evaluated = np.zeros(0, dtype=np.int64), 1

    paths = {}
    for s in range(1, t.n + 1):
        tree = min_hop_tree(t, s)
        for d in range(s + 1, t.n + 1):
            paths[(s, d)] = tree[d]
    for (s, d), ps, c in zip(arr.pairs, arr.cands, choice):
        paths[(s, d)] = ps[int(c)]
    for (s, d) in list(paths):
        paths[(d, s)] = paths[(s, d)][::-1]
    plan = plan_from_paths(t, dm, paths)
    power = network_power(t, plan, p, scheme, "non_bypass", nc_mode).total_W
    if arr.pairs and not math.isclose(power, best, rel_tol=1e-9, abs_tol=1e-6):
        raise AssertionError(f"kernel power {best} disagrees with power module {power}")
    return OracleResult(power, plan, int(evaluated))
