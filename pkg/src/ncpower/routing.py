"""Minimum-hop routing, bidirectional route plans and coding opportunities."""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass
from pathlib import Path

from ncpower.errors import ConnectivityError, DemandError, ParameterError, TopologyError
from ncpower.netmodel import Topology
from ncpower.traffic import DemandMatrix

Path_ = tuple[int, ...]


@dataclass(frozen=True)
class CodingTriple:
    """Intermediate node ``m`` between path neighbours ``n < k``.

    ``w_fwd`` is the aggregate Gbps travelling n->m->k, ``w_rev`` k->m->n.
    """

    n: int
    m: int
    k: int
    w_fwd: float
    w_rev: float

    @property
    def hi(self) -> float:
        return max(self.w_fwd, self.w_rev)

    @property
    def lo(self) -> float:
        return min(self.w_fwd, self.w_rev)


@dataclass(frozen=True)
class RoutePlan:
    topology: Topology
    demand: DemandMatrix
    paths: dict[tuple[int, int], Path_]
    link_load: dict[tuple[int, int], float]
    coding_triples: tuple[CodingTriple, ...]

    def hops(self, s: int, d: int) -> int:
        return len(self.paths[(s, d)]) - 1

    def end_loads(self) -> tuple[dict[tuple[int, int], float], dict[tuple[int, int], float]]:
        """Traffic added and dropped at each node, per neighbour.

        ``added[(m, n)]`` is Gbps originating at m that leaves towards n;
        ``dropped[(m, n)]`` is Gbps terminating at m that arrives from n.
        """
        added: dict[tuple[int, int], float] = defaultdict(float)
        dropped: dict[tuple[int, int], float] = defaultdict(float)
        for (s, d), p in self.paths.items():
            lam = self.demand[s, d]
            added[(s, p[1])] += lam
            dropped[(d, p[-2])] += lam
        return dict(added), dict(dropped)

    def to_dict(self) -> dict:
        return {
            "paths": [{"s": s, "d": d, "path": list(p)} for (s, d), p in sorted(self.paths.items())],
            "link_loads": [{"m": m, "n": n, "gbps": w} for (m, n), w in sorted(self.link_load.items())],
            "coding_triples": [
                {"n": t.n, "m": t.m, "k": t.k, "w_fwd": t.w_fwd, "w_rev": t.w_rev}
                for t in self.coding_triples
            ],
        }

    def save_json(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _bfs_dist(t: Topology, src: int) -> dict[int, int]:
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in t.neighbors(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def min_hop_tree(t: Topology, s: int) -> dict[int, Path_]:
    """Best path from ``s`` to every node under (hops, km, node sequence) order."""
    dist = _bfs_dist(t, s)
    layers: dict[int, list[int]] = defaultdict(list)
    for v, dv in dist.items():
        layers[dv].append(v)
    best: dict[int, tuple[float, Path_]] = {s: (0.0, (s,))}
    for depth in range(1, max(layers) + 1):
        for v in layers[depth]:
            cands = [
                (best[u][0] + t.length(u, v), best[u][1] + (v,))
                for u in t.neighbors(v)
                if dist.get(u) == depth - 1
            ]
            best[v] = min(cands)
    return {v: p for v, (_, p) in best.items()}


def min_hop_path(t: Topology, s: int, d: int) -> Path_:
    """Minimum-hop path; ties go to fewer km, then to the smaller node sequence."""
    if s == d:
        raise ParameterError("source and destination must differ")
    for x in (s, d):
        if not (1 <= x <= t.n):
            raise ParameterError(f"node {x} is not in the topology")
    tree = min_hop_tree(t, s)
    if d not in tree:
        raise ConnectivityError(f"node {d} is unreachable from node {s}")
    return tree[d]


def coding_opportunities(
    paths: dict[tuple[int, int], Path_], demand: DemandMatrix
) -> tuple[CodingTriple, ...]:
    """Aggregate every path's interior (n, m, k) windows into coding triples."""
    agg: dict[tuple[int, int, int], list[float]] = {}
    for (s, d), p in paths.items():
        lam = demand[s, d]
        if lam == 0:
            continue
        for i in range(1, len(p) - 1):
            n, m, k = p[i - 1], p[i], p[i + 1]
            slot = agg.setdefault((min(n, k), m, max(n, k)), [0.0, 0.0])
            slot[0 if n < k else 1] += lam
    keys = sorted(agg, key=lambda x: (x[1], x[0], x[2]))
    return tuple(CodingTriple(n, m, k, *agg[(n, m, k)]) for n, m, k in keys)


def plan_from_paths(t: Topology, dm: DemandMatrix, paths: dict[tuple[int, int], Path_]) -> RoutePlan:
    """Assemble loads and triples for an explicit set of paths."""
    load: dict[tuple[int, int], float] = {e: 0.0 for e in t.directed_links()}
    for (s, d), p in paths.items():
        lam = dm[s, d]
        for a, b in zip(p, p[1:]):
            if (a, b) not in load:
                raise TopologyError(f"path ({s},{d}) uses missing link ({a},{b})")
            load[(a, b)] += lam
    return RoutePlan(t, dm, dict(paths), load, coding_opportunities(paths, dm))


def route_all(t: Topology, dm: DemandMatrix) -> RoutePlan:
    """Route every ordered pair; (d, s) always reuses the reversed (s, d) path."""
    if dm.n != t.n:
        raise DemandError(f"demand matrix is {dm.n}x{dm.n} but topology has {t.n} nodes")
    paths: dict[tuple[int, int], Path_] = {}
    for s in range(1, t.n + 1):
        tree = min_hop_tree(t, s)
        for d in range(s + 1, t.n + 1):
            p = tree[d]
            paths[(s, d)] = p
            paths[(d, s)] = p[::-1]
    return plan_from_paths(t, dm, paths)


def flow_violations(plan: RoutePlan, tol: float = 1e-9) -> list[str]:
    """Check path validity, reverse pinning, conservation and load totals."""
    t, dm = plan.topology, plan.demand
    problems = []
    for (s, d), p in plan.paths.items():
        if p[0] != s or p[-1] != d:
            problems.append(f"path ({s},{d}) has wrong endpoints {p}")
        if len(set(p)) != len(p):
            problems.append(f"path ({s},{d}) repeats a node")
        for a, b in zip(p, p[1:]):
            if not t.has_link(a, b):
                problems.append(f"path ({s},{d}) uses missing link ({a},{b})")
        if plan.paths.get((d, s)) != p[::-1]:
            problems.append(f"path ({d},{s}) is not the reverse of ({s},{d})")
        lam = dm[s, d]
        net: dict[int, float] = defaultdict(float)
        for a, b in zip(p, p[1:]):
            net[a] += lam
            net[b] -= lam
        for m in range(1, t.n + 1):
            want = lam if m == s else (-lam if m == d else 0.0)
            if abs(net.get(m, 0.0) - want) > tol * max(1.0, lam):
                problems.append(f"conservation fails for ({s},{d}) at node {m}")
    recount: dict[tuple[int, int], float] = defaultdict(float)
    for (s, d), p in plan.paths.items():
        for a, b in zip(p, p[1:]):
            recount[(a, b)] += dm[s, d]
    for e in set(recount) | set(plan.link_load):
        if abs(recount.get(e, 0.0) - plan.link_load.get(e, 0.0)) > tol * max(1.0, recount.get(e, 0.0)):
            problems.append(f"link load mismatch on {e}")
    return problems


# --- XOR exchange ------------------------------------------------------------

@dataclass(frozen=True)
class ExchangeResult:
    recovered_a: bytes
    recovered_b: bytes
    slots: int
    transmissions: int
    coded_transmissions: int


def _xor(x: bytes, y: bytes) -> bytes:
    return bytes(a ^ b for a, b in zip(x, y))


def simulate_coded_exchange(
    stream_a: bytes, stream_b: bytes, hops: int, packet_size: int = 1
) -> ExchangeResult:
    """Relay two opposite streams along a chain, XOR-coding at every relay.

    Node 0 sends ``stream_a`` towards node ``hops``, which sends ``stream_b``
    back. Each slot, an end node emits its next packet; a relay holding a
    packet for each direction emits their XOR once, heard by both
    neighbours. A packet emitted in slot t is heard in slot t+1, and relays
    re-emit in the slot they hear it. Receivers strip the known half of a
    coded packet using the copy they sent earlier. Packets are zero padded
    to ``packet_size``; the original lengths travel as metadata.
    """
    if hops < 2:
        raise ParameterError("hops must be >= 2 so that at least one relay exists")
    if packet_size < 1:
        raise ParameterError("packet_size must be >= 1")
    stream_a, stream_b = bytes(stream_a), bytes(stream_b)

    def packets(data: bytes) -> list[bytes]:
        out = []
        for i in range(0, len(data), packet_size):
            chunk = data[i:i + packet_size]
            out.append(chunk + bytes(packet_size - len(chunk)))
        return out

    zero = bytes(packet_size)
    pk = {+1: packets(stream_a), -1: packets(stream_b)}  # +1 travels rightwards
    # queues[i][dir] holds (id, payload) waiting at node i to move in dir
    queues = [{+1: deque(), -1: deque()} for _ in range(hops + 1)]
    queues[0][+1].extend(enumerate(pk[+1]))
    queues[hops][-1].extend(enumerate(pk[-1]))
    sent: list[dict[tuple[int, int], bytes]] = [dict() for _ in range(hops + 1)]
    delivered = {+1: {}, -1: {}}
    inflight: list[tuple[int, int, int | None, int | None, bytes]] = []
    slot = transmissions = coded = 0
    want = {+1: len(pk[+1]), -1: len(pk[-1])}

    def done() -> bool:
        return len(delivered[+1]) == want[+1] and len(delivered[-1]) == want[-1]

    while not done():
        slot += 1
        if slot > 4 * (want[+1] + want[-1] + hops) + 8:
            raise RuntimeError("exchange did not terminate")
        # receive what was emitted last slot
        for sender, listener, rid, lid, payload in inflight:
            if listener > sender:  # heard from the left: keep the rightward part
                if rid is None:
                    continue
                own = sent[listener][(-1, lid)] if lid is not None else zero
                item = (rid, _xor(payload, own))
                direction = +1
            else:
                if lid is None:
                    continue
                own = sent[listener][(+1, rid)] if rid is not None else zero
                item = (lid, _xor(payload, own))
                direction = -1
            if listener in (0, hops):
                delivered[direction][item[0]] = item[1]
            else:
                queues[listener][direction].append(item)
        inflight = []
        # emit
        for i in range(hops + 1):
            r = queues[i][+1].popleft() if queues[i][+1] and i < hops else None
            lft = queues[i][-1].popleft() if queues[i][-1] and i > 0 else None
            if r is None and lft is None:
                continue
            transmissions += 1
            rid = lid = None
            payload = zero
            if r is not None:
                rid = r[0]
                sent[i][(+1, rid)] = r[1]
                payload = _xor(payload, r[1])
            if lft is not None:
                lid = lft[0]
                sent[i][(-1, lid)] = lft[1]
                payload = _xor(payload, lft[1])
            if r is not None and lft is not None:
                coded += 1
            for nb in (i - 1, i + 1):
                if 0 <= nb <= hops:
                    inflight.append((i, nb, rid, lid, payload))

    rec_a = b"".join(delivered[+1][j] for j in range(want[+1]))[: len(stream_a)]
    rec_b = b"".join(delivered[-1][j] for j in range(want[-1]))[: len(stream_b)]
    return ExchangeResult(rec_a, rec_b, slot, transmissions, coded)
