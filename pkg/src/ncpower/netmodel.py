"""Core-network topologies: representation, builders, hop metrics, amplifiers."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ncpower.errors import ConnectivityError, ParameterError, TopologyError

ZONES = ("PST", "MST", "CST", "EST")


@dataclass(frozen=True)
class Node:
    id: int
    zone: str


@dataclass(frozen=True)
class Link:
    a: int
    b: int
    length_km: float

    @property
    def key(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


@dataclass(frozen=True)
class Topology:
    """Undirected graph of core nodes joined by fibre links.

    Node ids are dense 1..N. Construction validates every structural
    invariant, so any ``Topology`` that exists is connected and simple.
    """

    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "links", tuple(self.links))
        ids = [nd.id for nd in self.nodes]
        if len(ids) < 2:
            raise TopologyError("a topology needs at least 2 nodes")
        if sorted(ids) != list(range(1, len(ids) + 1)):
            raise TopologyError(f"node ids must be exactly 1..{len(ids)}, got {sorted(ids)}")
        for i, nd in enumerate(self.nodes):
            if nd.zone not in ZONES:
                raise TopologyError(f"node index {i} (id {nd.id}) has unknown zone {nd.zone!r}")
        seen = set()
        n = len(ids)
        for i, ln in enumerate(self.links):
            if ln.a == ln.b:
                raise TopologyError(f"link index {i} is a self-loop on node {ln.a}")
            if not (1 <= ln.a <= n and 1 <= ln.b <= n):
                raise TopologyError(f"link index {i} ({ln.a},{ln.b}) references an unknown node")
            if not (ln.length_km > 0 and math.isfinite(ln.length_km)):
                raise TopologyError(f"link index {i} ({ln.a},{ln.b}) has non-positive length")
            if ln.key in seen:
                raise TopologyError(f"link index {i} duplicates undirected link {ln.key}")
            seen.add(ln.key)
        # connectivity check from node 1
        reached = {1}
        stack = [1]
        while stack:
            u = stack.pop()
            for v in self.neighbors(u):
                if v not in reached:
                    reached.add(v)
                    stack.append(v)
        if len(reached) != n:
            missing = sorted(set(range(1, n + 1)) - reached)
            raise ConnectivityError(f"topology is disconnected; unreachable from node 1: {missing}")

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def _adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {nd.id: [] for nd in self.nodes}
        for ln in self.links:
            adj[ln.a].append(ln.b)
            adj[ln.b].append(ln.a)
        return {k: tuple(sorted(v)) for k, v in adj.items()}

    @cached_property
    def _lengths(self) -> dict[tuple[int, int], float]:
        return {ln.key: float(ln.length_km) for ln in self.links}

    @cached_property
    def _zones(self) -> dict[int, str]:
        return {nd.id: nd.zone for nd in self.nodes}

    def neighbors(self, m: int) -> tuple[int, ...]:
        return self._adjacency[m]

    def zone(self, m: int) -> str:
        return self._zones[m]

    def has_link(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self._lengths

    def length(self, a: int, b: int) -> float:
        try:
            return self._lengths[(min(a, b), max(a, b))]
        except KeyError:
            raise TopologyError(f"no link between {a} and {b}") from None

    def directed_links(self) -> list[tuple[int, int]]:
        """Both orientations of every link, sorted."""
        out = []
        for ln in self.links:
            out.append((ln.a, ln.b))
            out.append((ln.b, ln.a))
        return sorted(out)

    def degree(self, m: int) -> int:
        return len(self._adjacency[m])

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """0-based CSR adjacency ``(indptr, indices)`` with sorted neighbours."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indices = []
        for m in range(1, self.n + 1):
            nb = self._adjacency[m]
            indptr[m] = indptr[m - 1] + len(nb)
            indices.extend(v - 1 for v in nb)
        return indptr, np.asarray(indices, dtype=np.int64)

    # JSON round trip
    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "nodes": [{"id": nd.id, "zone": nd.zone} for nd in self.nodes],
            "links": [{"a": ln.a, "b": ln.b, "km": ln.length_km} for ln in self.links],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Topology":
        try:
            nodes = [Node(int(x["id"]), str(x["zone"])) for x in data["nodes"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise TopologyError(f"malformed 'nodes' array: {exc}") from None
        links = []
        for i, x in enumerate(data.get("links", ())):
            try:
                links.append(Link(int(x["a"]), int(x["b"]), float(x["km"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise TopologyError(f"malformed link index {i}: {exc}") from None
        return cls(tuple(nodes), tuple(links), str(data.get("name", "")))


def load_topology(path: str | Path) -> Topology:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TopologyError(f"{path}: invalid JSON ({exc})") from None
    return Topology.from_dict(data)


def save_topology(t: Topology, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(t.to_dict(), fh, indent=2)
        fh.write("\n")


# --- built-in topologies ----------------------------------------------------

_NSFNET_LINKS = (
    (1, 2, 260), (1, 3, 252), (1, 4, 324), (2, 3, 380), (2, 7, 868),
    (3, 6, 416), (4, 11, 1140), (4, 5, 248), (5, 6, 272), (5, 7, 292),
    (6, 10, 704), (6, 13, 1036), (7, 8, 212), (8, 9, 224), (9, 10, 752),
    (9, 14, 668), (9, 12, 536), (11, 12, 408), (11, 14, 684), (12, 13, 664),
    (13, 14, 353),
)
_NSFNET_ZONES = {
    "PST": (1, 2, 3), "MST": (4, 5, 6), "CST": (7, 8, 10), "EST": (9, 11, 12, 13, 14),
}

# None marks a link drawn without a distance label
_USNET_LINKS = (
    (1, 2, 252), (2, 3, 216), (3, 4, None), (4, 5, 220), (3, 5, 432),
    (2, 6, 360), (3, 7, 304), (4, 7, 280), (5, 8, 368), (1, 6, 364),
    (7, 8, 464), (6, 7, 262), (6, 9, 360), (7, 9, 328), (9, 10, 440),
    (8, 10, 272), (9, 11, 364), (6, 11, 572), (11, 12, 288), (12, 13, 236),
    (13, 14, 244), (9, 12, 320), (10, 13, 320), (10, 14, 268), (11, 15, 344),
    (11, 19, 648), (12, 16, 280), (13, 17, 332), (14, 18, 368), (15, 16, None),
    (15, 20, 272), (16, 17, 224), (16, 21, 288), (16, 22, 272), (17, 18, 280),
    (17, 22, 168), (17, 23, 364), (18, 24, 280), (19, 20, 188), (20, 21, 216),
    (21, 22, 164), (22, 23, 260), (23, 24, 180),
)
_USNET_ZONES = {
    "PST": (1, 2, 3, 4, 5),
    "MST": (6, 7, 8),
    "CST": (9, 10, 11, 12, 13, 14, 17, 18),
    "EST": (15, 16, 19, 20, 21, 22, 23, 24),
}


def _zoned_nodes(zones: dict[str, Iterable[int]]) -> tuple[Node, ...]:
    pairs = sorted((i, z) for z, ids in zones.items() for i in ids)
    return tuple(Node(i, z) for i, z in pairs)


def nsfnet() -> Topology:
    links = tuple(Link(a, b, float(km)) for a, b, km in _NSFNET_LINKS)
    return Topology(_zoned_nodes(_NSFNET_ZONES), links, "nsfnet")


def usnet_fill_length() -> int:
    """Length given to unlabelled USNET links: mean of the labelled ones, rounded."""
    labelled = [km for _, _, km in _USNET_LINKS if km is not None]
    return round(sum(labelled) / len(labelled))


def usnet() -> Topology:
    fill = usnet_fill_length()
    links = tuple(Link(a, b, float(fill if km is None else km)) for a, b, km in _USNET_LINKS)
    return Topology(_zoned_nodes(_USNET_ZONES), links, "usnet")


def nsfnet_mean_length() -> float:
    return sum(km for _, _, km in _NSFNET_LINKS) / len(_NSFNET_LINKS)


def default_zones(n: int) -> tuple[str, ...]:
    """Zones for a synthetic topology: all nodes share the eastern profile.

    Regular topologies have no geography, so a single zone keeps the
    comparison between them about shape alone.
    """
    return ("EST",) * n


def build_regular(
    kind: str,
    n: int,
    link_km: float | None = None,
    center: int | None = None,
    zones: Sequence[str] | None = None,
) -> Topology:
    """Build a ring, line, star or full mesh on nodes 1..n with uniform lengths."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ParameterError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    km = nsfnet_mean_length() if link_km is None else float(link_km)
    if not (km > 0 and math.isfinite(km)):
        raise ParameterError(f"link_km must be positive, got {link_km!r}")
    if kind == "ring":
        if n < 3:
            raise ParameterError("a ring needs n >= 3")
        pairs = [(i, i + 1) for i in range(1, n)] + [(1, n)]
    elif kind == "line":
        pairs = [(i, i + 1) for i in range(1, n)]
    elif kind == "star":
        if center is None or not (1 <= center <= n):
            raise ParameterError(f"star needs a center in 1..{n}, got {center!r}")
        pairs = [(min(center, i), max(center, i)) for i in range(1, n + 1) if i != center]
    elif kind in ("full_mesh", "mesh"):
        kind = "full_mesh"
        pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    else:
        raise ParameterError(f"unknown topology kind {kind!r}")
    if zones is None:
        zones = default_zones(n)
    elif len(zones) != n:
        raise ParameterError(f"zones must have {n} entries, got {len(zones)}")
    nodes = tuple(Node(i + 1, z) for i, z in enumerate(zones))
    links = tuple(Link(a, b, km) for a, b in pairs)
    return Topology(nodes, links, f"{kind}{n}")


# --- metrics ----------------------------------------------------------------

@dataclass(frozen=True)
class HopMetrics:
    """Shortest-path hop counts. ``matrix[s-1, d-1]`` is h^{sd}."""

    matrix: np.ndarray
    total: int

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def average_exact(self) -> Fraction:
        return Fraction(self.total, self.n * (self.n - 1))

    @property
    def average(self) -> float:
        return self.total / (self.n * (self.n - 1))

    @property
    def h_max(self) -> int:
        return int(self.matrix.max())

    def hops(self, s: int, d: int) -> int:
        return int(self.matrix[s - 1, d - 1])


def hop_metrics(t: Topology) -> HopMetrics:
    from ncpower._kernels import hop_matrix

    indptr, indices = t.csr()
    mat = np.asarray(hop_matrix(t.n, indptr, indices), dtype=np.int64)
    if (mat < 0).any():
        s, d = np.argwhere(mat < 0)[0] + 1
        raise ConnectivityError(f"node {d} is unreachable from node {s}")
    mat.setflags(write=False)
    return HopMetrics(mat, int(mat.sum()))


def edfa_count(length_km: float, span_km: float) -> int:
    """Inline amplifiers on a link: floor(L/S - 1), never negative."""
    if not span_km > 0:
        raise ParameterError(f"span_km must be positive, got {span_km!r}")
    return max(0, math.floor(length_km / span_km - 1))
