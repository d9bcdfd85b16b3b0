import json
import math

import pytest

from ncpower.errors import CapacityError, ParameterError, TopologyError
from ncpower.netmodel import build_regular, nsfnet
from ncpower.power import (
    CSV_HEADER,
    TABLE4,
    TABLE5_GREENTOUCH,
    DeviceParams,
    coded_px_crossover,
    fibre_counts,
    load_params,
    nc_port_counts,
    network_power,
    port_counts_conventional,
    port_ratio_crossover,
    savings,
    sweep_port_ratio,
)
from ncpower.routing import route_all
from ncpower.traffic import DemandMatrix, equal_matrix, generate_matrix


def _line3(fwd, rev):
    t = build_regular("line", 3, link_km=80)
    return t, route_all(t, DemandMatrix.from_mapping(3, {(1, 3): fwd, (3, 1): rev}))


def test_presets_match_tables():
    assert (TABLE4.Pp, TABLE4.Px, TABLE4.Pt, TABLE4.Pe, TABLE4.Po, TABLE4.Pmd) == (1000, 1100, 73, 8, 85, 16)
    assert (TABLE4.W, TABLE4.B, TABLE4.S) == (16, 40, 80)
    g = TABLE5_GREENTOUCH
    assert (g.Pp, g.Px, g.Pt, g.Pe, g.Po, g.Pmd, g.W, g.B) == (46.7, 360, 332.6, 15.3, 8.5, 16, 32, 400)


def test_port_ratio_round_trip():
    p = TABLE4.with_port_ratio(1.6)
    assert p.port_ratio == pytest.approx(1.6)
    assert TABLE4.port_ratio == pytest.approx(1173 / 1073)


@pytest.mark.parametrize("kw", [{"Pp": 0}, {"B": -1}, {"Pe": -1}, {"W": 1.5}, {"Px": -100}])
def test_device_params_validation(kw):
    with pytest.raises(ParameterError):
        TABLE4.with_(**kw)


def test_load_params(tmp_path):
    assert load_params("table4") is TABLE4
    path = tmp_path / "p.json"
    path.write_text(json.dumps(TABLE4.with_(Px=900).to_dict()))
    assert load_params(path).Px == 900
    path.write_text(json.dumps({"Pp": 1}))
    with pytest.raises(ParameterError, match="missing"):
        load_params(path)
    with pytest.raises(ParameterError, match="unknown"):
        load_params(tmp_path / "nope.json")


def test_conventional_ports_line3(line3_plan):
    pc = port_counts_conventional(line3_plan, 40)
    assert pc.Y == {1: 1.0, 2: 2.0, 3: 1.0}


def test_max_rule_on_asymmetric_link():
    t = build_regular("line", 2)
    plan = route_all(t, DemandMatrix.from_mapping(2, {(1, 2): 80.0, (2, 1): 40.0}))
    assert port_counts_conventional(plan, 40).per_link[(1, 2)] == 2.0


def test_empty_plan_has_no_ports():
    t = build_regular("ring", 4)
    plan = route_all(t, equal_matrix(4, 0))
    assert set(port_counts_conventional(plan, 40).Y.values()) == {0.0}
    ncp = nc_port_counts(plan, 40, "partition")
    assert set(ncp.X.values()) == set(ncp.Y.values()) == {0.0}


def test_zero_pad_triple_80_50():
    _, plan = _line3(80, 50)
    ncp = nc_port_counts(plan, 40, "zero_pad")
    assert ncp.X[2] == 2.0 and ncp.residual[2] == 0.0


def test_partition_triple_80_50():
    _, plan = _line3(80, 50)
    ncp = nc_port_counts(plan, 40, "partition")
    assert ncp.X[2] == 1.25 and ncp.residual[2] == 0.75


def test_symmetric_triple_modes_agree(line3_plan):
    a = nc_port_counts(line3_plan, 40, "zero_pad")
    b = nc_port_counts(line3_plan, 40, "partition")
    assert a == b


def test_nc_port_counts_rejects_mode(line3_plan):
    with pytest.raises(ParameterError):
        nc_port_counts(line3_plan, 40, "both")


def test_line3_conventional_total(line3, line3_plan):
    pb = network_power(line3, line3_plan, TABLE4)
    assert pb.router_ports_W == 4000
    assert pb.transponders_W == 4 * 73
    assert (pb.switches_W, pb.muxdemux_W, pb.edfas_W) == (255, 48, 0)
    assert pb.total_W == 4595


def test_line3_coded_total(line3, line3_plan):
    # two end ports and one coded port; the relay transmits one coded stream
    # instead of two, so three transponders remain
    pb = network_power(line3, line3_plan, TABLE4, "nc", mode="zero_pad")
    assert pb.router_ports_W + pb.nc_ports_W == 3100
    assert pb.transponders_W == 3 * 73
    assert pb.total_W == 3622
    conv = network_power(line3, line3_plan, TABLE4)
    assert 1 - pb.core_W / conv.core_W == pytest.approx(0.225, abs=0.002)


def test_breakdown_sums_and_csv(nsf):
    plan = route_all(nsf, generate_matrix(nsf, 12, 0))
    for scheme, layer, mode in [("conventional", "non_bypass", "zero_pad"), ("nc", "bypass", "partition")]:
        pb = network_power(nsf, plan, TABLE4, scheme, layer, mode)
        assert math.isclose(sum(pb.components()), pb.total_W, rel_tol=1e-9)
        row = pb.csv_row(12)
        assert len(row) == len(CSV_HEADER) and row[:4] == ["12", scheme, layer, mode]
        assert all(len(x.split(".")[1]) == 6 for x in row[4:])


def test_network_power_argument_checks(line3_plan):
    with pytest.raises(ParameterError):
        network_power(line3_plan.topology, line3_plan, TABLE4, "magic")
    with pytest.raises(ParameterError):
        network_power(line3_plan.topology, line3_plan, TABLE4, layer="hybrid")
    with pytest.raises(TopologyError):
        network_power(build_regular("line", 3, link_km=81), line3_plan, TABLE4)


def test_fibres_and_capacity_limit():
    t = build_regular("line", 2, link_km=260)
    plan = route_all(t, DemandMatrix.from_mapping(2, {(1, 2): 641.0, (2, 1): 10.0}))
    assert fibre_counts(plan, TABLE4) == {(1, 2): 2, (2, 1): 1}
    pb = network_power(t, plan, TABLE4)
    assert pb.edfas_W == 8 * 2 * 3
    with pytest.raises(CapacityError):
        network_power(t, plan, TABLE4, fibre_limit=1)


def test_integral_mode_rounds_up(line3):
    plan = route_all(line3, DemandMatrix.from_mapping(3, {(1, 3): 50.0, (3, 1): 10.0}))
    frac = network_power(line3, plan, TABLE4, "nc")
    whole = network_power(line3, plan, TABLE4, "nc", integral=True)
    assert whole.total_W > frac.total_W
    assert all(float(v).is_integer() for v in whole.Y.values())


def test_full_mesh_coding_changes_nothing():
    t = build_regular("full_mesh", 6)
    plan = route_all(t, generate_matrix(t, 20, 1))
    conv = network_power(t, plan, TABLE4).total_W
    for mode in ("zero_pad", "partition"):
        assert network_power(t, plan, TABLE4, "nc", mode=mode).total_W == pytest.approx(conv, rel=1e-12)


def test_one_way_traffic_partition_equals_conventional():
    import numpy as np

    t = build_regular("line", 6)
    plan = route_all(t, DemandMatrix(np.triu(generate_matrix(t, 22, 0).values)))
    conv = network_power(t, plan, TABLE4).total_W
    assert network_power(t, plan, TABLE4, "nc", mode="partition").total_W == pytest.approx(conv, rel=1e-12)


def test_one_way_traffic_partition_never_worse(nsf):
    # opposite flows of different demands can still meet at a node and code
    import numpy as np

    plan = route_all(nsf, DemandMatrix(np.triu(generate_matrix(nsf, 22, 0).values)))
    conv = network_power(nsf, plan, TABLE4).total_W
    assert network_power(nsf, plan, TABLE4, "nc", mode="partition").total_W <= conv


def test_savings_helper():
    assert savings(100.0, 80.0) == pytest.approx(0.2)
    assert savings(0.0, 5.0) == 0.0


def test_sweep_at_unit_ratio_is_below_conventional(nsf):
    plan = route_all(nsf, generate_matrix(nsf, 22, 0))
    conv = network_power(nsf, plan, TABLE4).total_W
    rows = sweep_port_ratio(nsf, plan, TABLE4, "zero_pad", [1.0, 1.5, 2.0])
    assert rows[0][1] < conv
    assert [r for r, _ in rows] == [1.0, 1.5, 2.0]
    assert rows[0][1] <= rows[1][1] <= rows[2][1]


def test_crossovers_on_ensemble(nsf, nsf_ensemble):
    zp = port_ratio_crossover(nsf, nsf_ensemble, TABLE4, "zero_pad")
    pa = port_ratio_crossover(nsf, nsf_ensemble, TABLE4, "partition")
    assert zp == pytest.approx(1.6, abs=0.1)
    assert pa == pytest.approx(2.0, abs=0.05)


def test_crossover_without_triples_is_infinite():
    t = build_regular("full_mesh", 4)
    assert port_ratio_crossover(t, [route_all(t, equal_matrix(4, 5))], TABLE4, "zero_pad") == math.inf


def test_bypass_px_crossover_equal_traffic():
    t = nsfnet()
    plan = route_all(t, equal_matrix(14, 100))
    px = coded_px_crossover(t, [plan], TABLE5_GREENTOUCH, "zero_pad")
    assert px == pytest.approx(2 * TABLE5_GREENTOUCH.Pt, abs=1)


def test_bypass_router_ports_only_at_endpoints(line3, line3_plan):
    pb = network_power(line3, line3_plan, TABLE4, "conventional", "bypass")
    assert pb.Y == {1: 1.0, 2: 0.0, 3: 1.0}
    # endpoint transmitters plus two terminations at the relay
    assert pb.transponders_W == 73 * (2 + 2)
