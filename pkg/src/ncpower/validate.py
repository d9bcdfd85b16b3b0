"""Invariant checks run by ``ncpower validate``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ncpower.analytics import bounds, conventional_power_closed, nc_power_equal_closed
from ncpower.netmodel import ZONES, Link, Node, Topology, build_regular, hop_metrics, nsfnet, usnet
from ncpower.power import TABLE4, network_power
from ncpower.routing import flow_violations, route_all, simulate_coded_exchange
from ncpower.traffic import DemandMatrix, equal_matrix, generate_matrix, zone_profile


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def random_topology(rng: np.random.Generator, n: int) -> Topology:
    """Random spanning tree plus a few chords, all lengths in [50, 1500] km."""
    pairs = set()
    for v in range(2, n + 1):
        u = int(rng.integers(1, v))
        pairs.add((u, v))
    for _ in range(int(rng.integers(0, n))):
        a, b = sorted(int(x) for x in rng.choice(np.arange(1, n + 1), 2, replace=False))
        pairs.add((a, b))
    nodes = tuple(Node(i, ZONES[int(rng.integers(0, 4))]) for i in range(1, n + 1))
    links = tuple(Link(a, b, float(rng.uniform(50, 1500))) for a, b in sorted(pairs))
    return Topology(nodes, links, f"random{n}")


def random_demand(rng: np.random.Generator, n: int) -> DemandMatrix:
    v = rng.uniform(10, 230, size=(n, n))
    v[rng.random((n, n)) < 0.2] = 0.0
    return DemandMatrix(v)


def check_flow_conservation(count: int = 1000, seed: int = 0) -> str:
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(2, 13))
        t = random_topology(rng, n)
        plan = route_all(t, random_demand(rng, n))
        problems = flow_violations(plan)
        if problems:
            raise AssertionError(f"plan {i}: {problems[0]}")
    return f"{count} plans"


def _ensemble(t: Topology, count: int):
    for i in range(count):
        yield generate_matrix(t, (2 * i) % 24, i // 12)


def check_dominance(r_values=(1.0, 1.1, 1.5, 2.0), per_topology: int = 25) -> str:
    n = 0
    for t in (nsfnet(), usnet(), build_regular("ring", 9), build_regular("star", 8, center=1)):
        for dm in _ensemble(t, per_topology):
            plan = route_all(t, dm)
            for r in r_values:
                p = TABLE4.with_port_ratio(r)
                zp = network_power(t, plan, p, "nc", "non_bypass", "zero_pad").total_W
                pa = network_power(t, plan, p, "nc", "non_bypass", "partition").total_W
                if pa > zp * (1 + 1e-12):
                    raise AssertionError(f"{t.name} r={r}: partition {pa} > zero_pad {zp}")
                n += 1
    return f"{n} comparisons"


def check_sandwich(count: int = 100) -> str:
    t = nsfnet()
    worst = np.inf
    for dm in _ensemble(t, count):
        plan = route_all(t, dm)
        for mode in ("zero_pad", "partition"):
            value = network_power(t, plan, TABLE4, "nc", "non_bypass", mode).core_W
            b = bounds(t, dm, TABLE4, mode)
            if not b.contains(value):
                raise AssertionError(f"hour {dm.hour} seed {dm.seed} {mode}: {value} outside {b}")
            worst = min(worst, value / b.lower_equal_traffic_W - 1, b.upper_max_hop_W / value - 1)
    return f"{count} matrices x 2 modes, tightest margin {worst:.3%}"


def check_closed_forms(lam: float = 40.0) -> str:
    """Equal demands: routed reduced power matches the closed forms exactly."""
    count = 0
    topologies = [nsfnet(), usnet()]
    for n in range(3, 16):
        topologies += [build_regular("line", n), build_regular("ring", n),
                       build_regular("star", n, center=1), build_regular("full_mesh", n)]
    for t in topologies:
        h = hop_metrics(t).average
        plan = route_all(t, equal_matrix(t.n, lam))
        for scheme, want in (
            ("conventional", conventional_power_closed(t.n, h, TABLE4, lam)),
            ("nc", nc_power_equal_closed(t.n, h, TABLE4, lam, TABLE4.port_ratio)),
        ):
            got = network_power(t, plan, TABLE4, scheme).core_W
            if abs(got - want) > 1e-9 * want:
                raise AssertionError(f"{t.name} {scheme}: routed {got} vs closed form {want}")
            count += 1
    return f"{count} topology/scheme cases"


def check_xor_exchange(count: int = 100, seed: int = 0) -> str:
    rng = np.random.default_rng(seed)
    for i in range(count):
        a = rng.bytes(int(rng.integers(0, 1025)))
        b = rng.bytes(int(rng.integers(0, 1025)))
        hops = int(rng.integers(2, 6))
        size = int(rng.integers(1, 65))
        res = simulate_coded_exchange(a, b, hops, packet_size=size)
        if res.recovered_a != a or res.recovered_b != b:
            raise AssertionError(f"pair {i} (hops {hops}, packet {size}) not recovered")
    return f"{count} stream pairs"


def check_zone_means(seeds: int = 1000, hour: int = 22, tol: float = 0.02) -> str:
    t = nsfnet()
    sums = {z: 0.0 for z in ZONES}
    counts = {z: 0 for z in ZONES}
    for seed in range(seeds):
        v = generate_matrix(t, hour, seed).values
        for s in range(1, t.n + 1):
            z = t.zone(s)
            sums[z] += v[s - 1].sum()
            counts[z] += t.n - 1
    worst = 0.0
    for z in ZONES:
        dev = abs(sums[z] / counts[z] / zone_profile(z, hour) - 1)
        worst = max(worst, dev)
        if dev > tol:
            raise AssertionError(f"zone {z}: mean deviates {dev:.3%} from the profile")
    return f"{seeds} seeds, worst zone deviation {worst:.3%}"


CHECKS: dict[str, Callable[[], str]] = {
    "flow_conservation": check_flow_conservation,
    "partition_dominance": check_dominance,
    "bound_sandwich": check_sandwich,
    "closed_forms": check_closed_forms,
    "xor_exchange": check_xor_exchange,
    "zone_means": check_zone_means,
}


def run_all(names=None) -> list[CheckResult]:
    out = []
    for name, fn in CHECKS.items():
        if names and name not in names:
            continue
        t0 = time.perf_counter()
        try:
            detail, ok = fn(), True
        except AssertionError as exc:
            detail, ok = str(exc), False
        out.append(CheckResult(name, ok, detail, time.perf_counter() - t0))
    return out
