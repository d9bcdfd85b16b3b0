"""Randomised invariants over topologies, demands and device parameters."""

import math

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from ncpower.analytics import bounds, partition_weight, savings_equal
from ncpower.milp import brute_force_optimum, mode_parts, parse_solution_text, write_solution
from ncpower.netmodel import ZONES, Link, Node, Topology, build_regular, edfa_count, hop_metrics
from ncpower.power import TABLE4, network_power
from ncpower.routing import flow_violations, route_all, simulate_coded_exchange
from ncpower.traffic import DemandMatrix, generate_matrix


@st.composite
def topologies(draw, min_n=2, max_n=10):
    n = draw(st.integers(min_n, max_n))
    pairs = {(draw(st.integers(1, v - 1)), v) for v in range(2, n + 1)}
    if n > 2:
        for _ in range(draw(st.integers(0, n))):
            a, b = sorted(draw(st.lists(st.integers(1, n), min_size=2, max_size=2, unique=True)))
            pairs.add((a, b))
    zones = draw(st.lists(st.sampled_from(ZONES), min_size=n, max_size=n))
    km = draw(st.lists(st.floats(50, 1500), min_size=len(pairs), max_size=len(pairs)))
    nodes = tuple(Node(i + 1, z) for i, z in enumerate(zones))
    return Topology(nodes, tuple(Link(a, b, x) for (a, b), x in zip(sorted(pairs), km)))


@st.composite
def demands(draw, n, symmetric=False):
    vals = draw(st.lists(st.one_of(st.just(0.0), st.floats(10, 230)), min_size=n * n, max_size=n * n))
    v = np.array(vals).reshape(n, n)
    if symmetric:
        v = np.triu(v) + np.triu(v, 1).T
    return DemandMatrix(v)


@st.composite
def networks(draw, symmetric=False, max_n=10):
    t = draw(topologies(max_n=max_n))
    return t, draw(demands(t.n, symmetric))


@given(networks())
def test_routing_conserves_flow(net):
    t, dm = net
    plan = route_all(t, dm)
    assert flow_violations(plan) == []
    hm = hop_metrics(t)
    want = sum(dm[s, d] * hm.hops(s, d) for s, d in dm.pairs())
    assert math.isclose(sum(plan.link_load.values()), want, rel_tol=1e-9, abs_tol=1e-9)


@given(networks())
def test_triples_carry_interior_traffic(net):
    t, dm = net
    plan = route_all(t, dm)
    hm = hop_metrics(t)
    interior = sum(dm[s, d] * (hm.hops(s, d) - 1) for s, d in dm.pairs())
    carried = sum(tr.w_fwd + tr.w_rev for tr in plan.coding_triples)
    assert math.isclose(carried, interior, rel_tol=1e-9, abs_tol=1e-9)
    for tr in plan.coding_triples:
        assert tr.n < tr.k and t.has_link(tr.n, tr.m) and t.has_link(tr.m, tr.k)


@given(networks(), st.sampled_from([1.0, 1.1, 1.5, 2.0, 2.7]))
def test_partition_dominates_zero_pad(net, r):
    t, dm = net
    plan = route_all(t, dm)
    p = TABLE4.with_port_ratio(r)
    zp = network_power(t, plan, p, "nc", mode="zero_pad").total_W
    pa = network_power(t, plan, p, "nc", mode="partition").total_W
    assert pa <= zp * (1 + 1e-12)


@given(networks(symmetric=True), st.floats(0.0, 2.0))
def test_symmetric_traffic_codes_profitably_up_to_two(net, r):
    t, dm = net
    plan = route_all(t, dm)
    p = TABLE4.with_port_ratio(r)
    conv = network_power(t, plan, p).total_W
    assert network_power(t, plan, p, "nc", mode="zero_pad").total_W <= conv * (1 + 1e-12)


@given(networks(), st.sampled_from(["conventional", "nc"]), st.sampled_from(["non_bypass", "bypass"]),
       st.sampled_from(["zero_pad", "partition"]))
def test_breakdown_components_sum(net, scheme, layer, mode):
    t, dm = net
    pb = network_power(t, route_all(t, dm), TABLE4, scheme, layer, mode)
    assert math.isclose(sum(pb.components()), pb.total_W, rel_tol=1e-9)
    assert min(pb.components()) >= 0


@given(networks(max_n=7), st.sampled_from(["Pp", "Px", "Pt", "Pe"]), st.floats(1.0, 3.0),
       st.sampled_from([("conventional", "zero_pad"), ("nc", "zero_pad"), ("nc", "partition")]),
       st.sampled_from(["non_bypass", "bypass"]))
def test_power_monotone_in_device_figures(net, field, factor, regime, layer):
    t, dm = net
    plan = route_all(t, dm)
    scheme, mode = regime
    base = network_power(t, plan, TABLE4, scheme, layer, mode).total_W
    bumped = TABLE4.with_(**{field: getattr(TABLE4, field) * factor})
    assert network_power(t, plan, bumped, scheme, layer, mode).total_W >= base * (1 - 1e-12)


@given(networks(max_n=7), st.floats(0.0, 100.0), st.data(),
       st.sampled_from([("conventional", "zero_pad"), ("nc", "zero_pad"), ("nc", "partition")]))
def test_power_monotone_in_demand(net, extra, data, regime):
    # holds for partitioning because a coded port costs at least a plain one
    t, dm = net
    s = data.draw(st.integers(1, t.n))
    d = data.draw(st.integers(1, t.n).filter(lambda x: x != s))
    v = dm.values.copy()
    v[s - 1, d - 1] += extra
    scheme, mode = regime
    before = network_power(t, route_all(t, dm), TABLE4, scheme, "non_bypass", mode).total_W
    after = network_power(t, route_all(t, DemandMatrix(v)), TABLE4, scheme, "non_bypass", mode).total_W
    assert after >= before * (1 - 1e-12)


@given(networks(), st.sampled_from(["zero_pad", "partition"]), st.floats(0.5, 2.5))
def test_bounds_sandwich_model(net, mode, r):
    t, dm = net
    assume(dm.total() > 0)
    p = TABLE4.with_port_ratio(r)
    value = network_power(t, route_all(t, dm), p, "nc", mode=mode).core_W
    b = bounds(t, dm, p, mode)
    assert b.contains(value, rel=1e-9)
    assert b.lower_full_mesh_W <= b.lower_equal_traffic_W * (1 + 1e-12)
    assert b.upper_max_hop_W <= b.upper_joint_W * (1 + 1e-12)
    assert b.upper_max_traffic_W <= b.upper_joint_W * (1 + 1e-12)


@given(st.binary(max_size=600), st.binary(max_size=600), st.integers(2, 6), st.integers(1, 40))
def test_xor_exchange_is_lossless(a, b, hops, size):
    res = simulate_coded_exchange(a, b, hops, packet_size=size)
    assert (res.recovered_a, res.recovered_b) == (a, b)


@given(st.integers(0, 23), st.integers(0, 10**6))
def test_generated_demands_in_range_and_repeatable(hour, seed):
    t = build_regular("star", 5, center=2)
    a = generate_matrix(t, hour, seed)
    assert a.offdiag().min() >= 10 and a.offdiag().max() <= 230
    assert np.array_equal(a.values, generate_matrix(t, hour, seed).values)


@given(st.floats(0, 5000), st.floats(0, 5000), st.floats(1, 200))
def test_edfa_count_monotone_floor(a, b, span):
    lo, hi = sorted((a, b))
    assert edfa_count(lo, span) <= edfa_count(hi, span)
    assert edfa_count(hi, span) == max(0, math.floor(hi / span - 1))


@given(st.floats(1, 30), st.floats(1, 30), st.floats(0, 1.99))
def test_savings_equal_increases_with_hops(h1, h2, r):
    assume(abs(h1 - h2) > 1e-6)
    lo, hi = sorted((h1, h2))
    assert savings_equal(lo, r) < savings_equal(hi, r)


@given(st.floats(0, 500), st.floats(0, 500), st.floats(0, 3))
def test_partition_weight_symmetric(a, b, r):
    hi, lo = max(a, b), min(a, b)
    assert partition_weight(hi, lo, r) == partition_weight(max(b, a), min(b, a), r)


@given(st.dictionaries(st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,12}", fullmatch=True),
                       st.floats(-1e9, 1e9, allow_nan=False), max_size=30),
       st.floats(-1e9, 1e9, allow_nan=False))
def test_solution_file_round_trip(tmp_path_factory, values, objective):
    assume(all(k.lower() not in ("objective", "status", "model") for k in values))
    path = write_solution(values, objective, tmp_path_factory.mktemp("sol") / "s.txt")
    parsed, obj = parse_solution_text(path.read_text())
    assert set(parsed) == set(values)
    for k, v in values.items():
        assert math.isclose(parsed[k], v, rel_tol=1e-11, abs_tol=1e-300)
    assert math.isclose(obj, objective, rel_tol=1e-11, abs_tol=1e-300)


@given(st.sampled_from([("line", 4), ("ring", 4), ("star", 5), ("ring", 5)]), st.integers(0, 23),
       st.integers(0, 50), st.sampled_from(["conventional", "nc_zero_pad", "nc_partition"]))
def test_oracle_not_worse_than_heuristic(case, hour, seed, mode):
    kind, n = case
    t = build_regular(kind, n, center=1 if kind == "star" else None)
    dm = generate_matrix(t, hour, seed)
    scheme, nc_mode = mode_parts(mode)
    heur = network_power(t, route_all(t, dm), TABLE4, scheme, "non_bypass", nc_mode).total_W
    assert brute_force_optimum(t, dm, TABLE4, mode).power_W <= heur * (1 + 1e-12)
