"""Build the routing-and-dimensioning MILP and map route plans onto its variables.

At any integral point the objective equals ``power.network_power`` (non
bypass, fractional ports) for the routing encoded in the ``b`` variables,
provided the port and fibre variables sit at their smallest feasible
values, which is where a minimiser puts them.
"""

from __future__ import annotations

import math

from ncpower.errors import ParameterError
from ncpower.milp.ir import ModelIR
from ncpower.netmodel import Topology, edfa_count
from ncpower.power import DeviceParams, fibre_counts
from ncpower.routing import RoutePlan
from ncpower.traffic import DemandMatrix

MODEL_MODES = ("conventional", "nc_zero_pad", "nc_partition")


def _nm(*parts) -> str:
    return "_".join(str(x) for x in parts)


def routed_pairs(dm: DemandMatrix) -> list[tuple[int, int]]:
    """Ordered pairs that get routing variables: either direction carries traffic."""
    return [(s, d) for s, d in dm.pairs() if dm[s, d] > 0 or dm[d, s] > 0]


def coding_windows(t: Topology) -> list[tuple[int, int, int]]:
    """Every (n, m, k) with n != k and links n-m, m-k: a place two hops can meet."""
    out = []
    for m in range(1, t.n + 1):
        nb = t.neighbors(m)
        for n in nb:
            for k in nb:
                if n != k:
                    out.append((n, m, k))
    return out


def big_m(dm: DemandMatrix) -> float:
    """Total offered traffic, which no flow difference can exceed."""
    return max(dm.total(), 1.0)


def mode_parts(mode: str) -> tuple[str, str]:
    """Model mode to the (scheme, coding mode) pair used by the power module."""
    if mode not in MODEL_MODES:
        raise ParameterError(f"mode must be one of {MODEL_MODES}, got {mode!r}")
    if mode == "conventional":
        return "conventional", "zero_pad"
    return "nc", mode[3:]


def build_model(
    t: Topology,
    dm: DemandMatrix,
    p: DeviceParams,
    mode: str = "nc_zero_pad",
    layer: str = "non_bypass",
) -> ModelIR:
    """Joint routing, port, transponder and fibre model.

    Variables: ``b``/``w`` per demand and directed link, ``w_m_n`` link
    loads, ``f_m_n`` fibres, ``Npo``/``Npi``/``Np`` end-port units, ``Y_m``
    conventional port units and, when coding, ``c`` hop-pair indicators,
    ``H_m_n_k`` the larger coded direction, ``Dp``/``Dm`` which direction
    is larger, ``X_m_n_k`` coded port units and (partitioning) ``R_m_n_k``
    uncoded remainder units.
    """
    if layer != "non_bypass":
        raise ParameterError("only the non_bypass layer has a MILP formulation")
    scheme, nc_mode = mode_parts(mode)
    if dm.n != t.n:
        raise ParameterError(f"demand matrix is {dm.n}x{dm.n} but topology has {t.n} nodes")
    coded = scheme == "nc"
    B = p.B
    links = t.directed_links()
    pairs = routed_pairs(dm)
    M = big_m(dm)
    ir = ModelIR(name=f"{t.name or 'net'}_{mode}", mode=mode)
    nodes = range(1, t.n + 1)

    for s, d in pairs:
        lam = dm[s, d]
        for m, n in links:
            ir.add_var(_nm("b", s, d, m, n), "binary")
            ir.add_var(_nm("w", s, d, m, n), "continuous", 0.0, lam)
    for m, n in links:
        ir.add_var(_nm("w", m, n))
        ir.add_var(_nm("f", m, n), "integer")
        for fam in ("Npo", "Npi", "Np"):
            ir.add_var(_nm(fam, m, n))
    for m in nodes:
        ir.add_var(_nm("Y", m))

    windows = coding_windows(t) if coded else []
    if coded:
        for s, d in pairs:
            for n, m, k in windows:
                if m not in (s, d):
                    ir.add_var(_nm("c", s, d, n, m, k), "binary")
        for n, m, k in windows:
            if n < k:
                ir.add_var(_nm("H", m, n, k))
                ir.add_var(_nm("Dp", m, n, k), "binary")
                ir.add_var(_nm("Dm", m, n, k), "binary")
                ir.add_var(_nm("X", m, n, k))
                if nc_mode == "partition":
                    ir.add_var(_nm("R", m, n, k))

    # routing: one simple path per demand, reverse demand on the reverse path
    for s, d in pairs:
        lam = dm[s, d]
        for m in nodes:
            out_t = [(_nm("b", s, d, m, n), 1.0) for n in t.neighbors(m)]
            in_t = [(_nm("b", s, d, n, m), -1.0) for n in t.neighbors(m)]
            rhs = 1.0 if m == s else (-1.0 if m == d else 0.0)
            ir.add_constraint(_nm("flow", s, d, m), out_t + in_t, "=", rhs)
            ir.add_constraint(_nm("once", s, d, m), out_t, "<=", 0.0 if m == d else 1.0)
        ir.add_constraint(_nm("nosrcin", s, d),
                          [(_nm("b", s, d, n, s), 1.0) for n in t.neighbors(s)], "=", 0.0)
        for m, n in links:
            ir.add_constraint(_nm("vol", s, d, m, n),
                              [(_nm("w", s, d, m, n), 1.0), (_nm("b", s, d, m, n), -lam)], "=", 0.0)
            if s < d:
                ir.add_constraint(_nm("pin", s, d, m, n),
                                  [(_nm("b", s, d, m, n), 1.0), (_nm("b", d, s, n, m), -1.0)], "=", 0.0)

    # link loads and fibres
    for m, n in links:
        ir.add_constraint(_nm("load", m, n),
                          [(_nm("w", m, n), 1.0)] + [(_nm("w", s, d, m, n), -1.0) for s, d in pairs],
                          "=", 0.0)
        ir.add_constraint(_nm("cap", m, n), [(_nm("w", m, n), 1.0), (_nm("f", m, n), -p.W * B)], "<=", 0.0)

    # ports for traffic added or dropped at m, sized by the larger direction
    for m, n in links:
        orig = [(_nm("w", s, d, m, n), -1.0 / B) for s, d in pairs if s == m]
        term = [(_nm("w", s, d, n, m), -1.0 / B) for s, d in pairs if d == m]
        ir.add_constraint(_nm("npo", m, n), [(_nm("Npo", m, n), 1.0)] + orig, "=", 0.0)
        ir.add_constraint(_nm("npi", m, n), [(_nm("Npi", m, n), 1.0)] + term, "=", 0.0)
        ir.add_constraint(_nm("npmaxo", m, n), [(_nm("Np", m, n), 1.0), (_nm("Npo", m, n), -1.0)], ">=", 0.0)
        ir.add_constraint(_nm("npmaxi", m, n), [(_nm("Np", m, n), 1.0), (_nm("Npi", m, n), -1.0)], ">=", 0.0)

    if coded:
        for s, d in pairs:
            for n, m, k in windows:
                if m in (s, d):
                    continue
                c = _nm("c", s, d, n, m, k)
                b1, b2 = _nm("b", s, d, n, m), _nm("b", s, d, m, k)
                ir.add_constraint(_nm("lin1", s, d, n, m, k), [(c, 1.0), (b1, -1.0)], "<=", 0.0)
                ir.add_constraint(_nm("lin2", s, d, n, m, k), [(c, 1.0), (b2, -1.0)], "<=", 0.0)
                ir.add_constraint(_nm("lin3", s, d, n, m, k), [(c, 1.0), (b1, -1.0), (b2, -1.0)], ">=", -1.0)
        for n, m, k in windows:
            if n > k:
                continue
            fwd = [(_nm("c", s, d, n, m, k), dm[s, d]) for s, d in pairs if m not in (s, d)]
            rev = [(_nm("c", s, d, k, m, n), dm[s, d]) for s, d in pairs if m not in (s, d)]
            neg = lambda terms: [(v, -x) for v, x in terms]  # noqa: E731
            H, Dp, Dm = _nm("H", m, n, k), _nm("Dp", m, n, k), _nm("Dm", m, n, k)
            ir.add_constraint(_nm("hfwd", m, n, k), [(H, 1.0)] + neg(fwd), ">=", 0.0)
            ir.add_constraint(_nm("hrev", m, n, k), [(H, 1.0)] + neg(rev), ">=", 0.0)
            ir.add_constraint(_nm("hcapf", m, n, k), [(H, 1.0), (Dm, -M)] + neg(fwd), "<=", 0.0)
            ir.add_constraint(_nm("hcapr", m, n, k), [(H, 1.0), (Dp, -M)] + neg(rev), "<=", 0.0)
            ir.add_constraint(_nm("dsum", m, n, k), [(Dp, 1.0), (Dm, 1.0)], "=", 1.0)
            X = _nm("X", m, n, k)
            if nc_mode == "zero_pad":
                ir.add_constraint(_nm("xcount", m, n, k), [(X, B), (H, -1.0)], "=", 0.0)
            else:
                # coded share is the smaller direction; the excess stays uncoded
                R = _nm("R", m, n, k)
                ir.add_constraint(_nm("xcount", m, n, k), [(X, B), (H, 1.0)] + neg(fwd) + neg(rev), "=", 0.0)
                ir.add_constraint(_nm("rcount", m, n, k), [(R, B), (H, -2.0)] + fwd + rev, "=", 0.0)

    # conventional port units per node
    for m in nodes:
        terms = []
        for n in t.neighbors(m):
            terms.append((_nm("Np", m, n), -1.0))
            if not coded:
                terms += [(_nm("w", m, n), -0.5 / B), (_nm("Npo", m, n), 0.5),
                          (_nm("w", n, m), -0.5 / B), (_nm("Npi", m, n), 0.5)]
        if coded and nc_mode == "partition":
            terms += [(_nm("R", mm, n, k), -1.0) for n, mm, k in windows if mm == m and n < k]
        ir.add_constraint(_nm("ports", m), [(_nm("Y", m), 1.0)] + terms, "=", 0.0)

    # objective
    for m in nodes:
        ir.add_objective(_nm("Y", m), p.Pp)
    for m, n in links:
        a = edfa_count(t.length(m, n), p.S)
        if a:
            ir.add_objective(_nm("f", m, n), p.Pe * a)
        if coded:
            ir.add_objective(_nm("Npo", m, n), p.Pt)
        else:
            ir.add_objective(_nm("w", m, n), p.Pt / B)
    for n, m, k in windows:
        if n < k:
            ir.add_objective(_nm("X", m, n, k), p.Px + p.Pt)
            if nc_mode == "partition":
                ir.add_objective(_nm("R", m, n, k), p.Pt)
    ir.objective_constant = (p.Po + p.Pmd) * t.n
    return ir


def plan_assignment(ir: ModelIR, t: Topology, plan: RoutePlan, p: DeviceParams) -> dict[str, float]:
    """Values for every model variable that encode ``plan``.

    Port and fibre variables take their smallest feasible values, so the
    objective at this point equals the plan's evaluated power.
    """
    dm = plan.demand
    B = p.B
    vals = {name: 0.0 for name in ir.variables}
    pairs = routed_pairs(dm)
    for s, d in pairs:
        path = plan.paths[(s, d)]
        for a, b in zip(path, path[1:]):
            vals[_nm("b", s, d, a, b)] = 1.0
            vals[_nm("w", s, d, a, b)] = dm[s, d]
        for n, m, k in zip(path, path[1:], path[2:]):
            name = _nm("c", s, d, n, m, k)
            if name in vals:
                vals[name] = 1.0
    added, dropped = plan.end_loads()
    fibres = fibre_counts(plan, p)
    scheme, nc_mode = mode_parts(ir.mode)
    coded = scheme == "nc"
    partition = coded and nc_mode == "partition"
    for e in t.directed_links():
        m, n = e
        vals[_nm("w", m, n)] = plan.link_load.get(e, 0.0)
        vals[_nm("f", m, n)] = float(fibres.get(e, 0))
        npo = added.get(e, 0.0) / B
        npi = dropped.get(e, 0.0) / B
        vals[_nm("Npo", m, n)] = npo
        vals[_nm("Npi", m, n)] = npi
        vals[_nm("Np", m, n)] = max(npo, npi)
    for m in range(1, t.n + 1):
        y = 0.0
        for n in t.neighbors(m):
            y += vals[_nm("Np", m, n)]
            if not coded:
                y += 0.5 * (vals[_nm("w", m, n)] / B - vals[_nm("Npo", m, n)]
                            + vals[_nm("w", n, m)] / B - vals[_nm("Npi", m, n)])
        vals[_nm("Y", m)] = y
    if coded:
        triples = {(tr.n, tr.m, tr.k): tr for tr in plan.coding_triples}
        for name in ir.variables:
            if not name.startswith("H_"):
                continue
            _, m, n, k = name.split("_")
            m, n, k = int(m), int(n), int(k)
            tr = triples.get((n, m, k))
            fwd, rev = (tr.w_fwd, tr.w_rev) if tr else (0.0, 0.0)
            hi, lo = max(fwd, rev), min(fwd, rev)
            vals[name] = hi
            vals[_nm("Dp", m, n, k)] = 1.0 if fwd >= rev else 0.0
            vals[_nm("Dm", m, n, k)] = 0.0 if fwd >= rev else 1.0
            if partition:
                vals[_nm("X", m, n, k)] = lo / B
                vals[_nm("R", m, n, k)] = (hi - lo) / B
                vals[_nm("Y", m)] += (hi - lo) / B
            else:
                vals[_nm("X", m, n, k)] = hi / B
    return vals
