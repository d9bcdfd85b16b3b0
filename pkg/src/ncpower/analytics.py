"""Closed-form power of conventional and coded networks, savings limits and bounds.

Everything here uses the reduced accounting of router ports, coded ports
and transponders; amplifiers, switches and multiplexers are left out.
``PowerBreakdown.core_W`` is the matching quantity from the power module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ncpower.errors import ParameterError
from ncpower.netmodel import Topology, hop_metrics
from ncpower.power import DeviceParams
from ncpower.traffic import DemandMatrix

KINDS = ("line", "ring", "star", "full_mesh")


def _check_nonneg(name: str, v: float) -> None:
    if not (v >= 0 and math.isfinite(v)):
        raise ParameterError(f"{name} must be finite and >= 0, got {v!r}")


def per_gbps_hop(p: DeviceParams) -> float:
    """Watts for one Gbps crossing one hop: a router port plus a transponder."""
    return (p.Pp + p.Pt) / p.B


def single_hop_power(p: DeviceParams, lam: float) -> float:
    """Power of carrying ``lam`` Gbps over a single hop."""
    _check_nonneg("lambda", lam)
    return per_gbps_hop(p) * lam


def conventional_power_closed(n: int, h: float, p: DeviceParams, lam: float) -> float:
    """All n(n-1) demands equal to ``lam``, each crossing ``h`` hops on average."""
    if n < 2:
        raise ParameterError("n must be >= 2")
    return single_hop_power(p, lam) * h * n * (n - 1)


def nc_power_equal_closed(n: int, h: float, p: DeviceParams, lam: float, r: float) -> float:
    """Equal demands with coding at every intermediate node.

    End nodes keep conventional ports; each intermediate node serves both
    directions of a pair at port ratio ``r``, i.e. r/2 per direction.
    """
    if n < 2:
        raise ParameterError("n must be >= 2")
    _check_nonneg("r", r)
    return single_hop_power(p, lam) * n * (n - 1) * (1 + r * (h - 1) / 2)


def savings_equal(h: float, r: float) -> float:
    """Fractional saving of coding over conventional routing for equal demands."""
    if h < 1:
        raise ParameterError(f"average hop count must be >= 1, got {h!r}")
    _check_nonneg("r", r)
    return 1 - (1 + 0.5 * r * (h - 1)) / h


def avg_hop_formula(kind: str, n: int) -> Fraction:
    """Exact average min-hop count of a regular topology on n nodes."""
    if kind == "mesh":
        kind = "full_mesh"
    if kind not in KINDS:
        raise ParameterError(f"unknown topology kind {kind!r}")
    if n < 2 or (kind == "ring" and n < 3):
        raise ParameterError(f"n={n} is too small for a {kind}")
    if kind == "full_mesh":
        return Fraction(1)
    if kind == "line":
        return Fraction(n + 1, 3)
    if kind == "star":
        return Fraction(2 * (n - 1), n)
    if n % 2:
        return Fraction(n + 1, 4)
    return Fraction(n * n, 4 * (n - 1))


def asymptotic_savings(kind: str, r: float) -> float:
    """Saving as n grows without bound.

    Line and ring hop counts diverge, leaving 1 - r/2. A star's average hop
    count tends to 2, leaving (1 - r/2)/2. A full mesh never codes.
    """
    _check_nonneg("r", r)
    if kind == "mesh":
        kind = "full_mesh"
    if kind in ("line", "ring"):
        return 1 - r / 2
    if kind == "star":
        return (1 - r / 2) / 2
    if kind == "full_mesh":
        return 0.0
    raise ParameterError(f"unknown topology kind {kind!r}")


@dataclass(frozen=True)
class BoundSet:
    """Lower and upper bounds on the coded network's reduced power (W)."""

    lower_equal_traffic_W: float
    lower_full_mesh_W: float
    upper_max_traffic_W: float
    upper_max_hop_W: float
    upper_joint_W: float

    def lowers(self) -> dict[str, float]:
        return {"lower_equal_traffic": self.lower_equal_traffic_W,
                "lower_full_mesh": self.lower_full_mesh_W}

    def uppers(self) -> dict[str, float]:
        return {"upper_max_traffic": self.upper_max_traffic_W,
                "upper_max_hop": self.upper_max_hop_W,
                "upper_joint": self.upper_joint_W}

    def as_rows(self) -> list[tuple[str, float]]:
        return [*self.lowers().items(), *self.uppers().items()]

    def contains(self, value: float, rel: float = 1e-9) -> bool:
        slack = rel * max(1.0, abs(value))
        return (all(v <= value + slack for v in self.lowers().values())
                and all(value <= v + slack for v in self.uppers().values()))


@dataclass(frozen=True)
class _PairStats:
    hi: np.ndarray      # larger direction of the pair
    lo: np.ndarray      # smaller direction
    mean: float         # average over all ordered pairs
    hop_weighted: float  # sum over ordered pairs of λ^{sd}·(h^{sd} - 1)
    peak: float         # largest single demand
    n: int
    h_avg: float
    h_max: int


def _pair_stats(t: Topology, dm: DemandMatrix) -> _PairStats:
    if dm.n != t.n:
        raise ParameterError(f"demand matrix is {dm.n}x{dm.n} but topology has {t.n} nodes")
    hm = hop_metrics(t)
    iu = np.triu_indices(t.n, k=1)
    fwd, rev = dm.values[iu], dm.values.T[iu]
    off = dm.offdiag()
    return _PairStats(
        hi=np.maximum(fwd, rev),
        lo=np.minimum(fwd, rev),
        mean=float(off.mean()),
        hop_weighted=float(np.sum((fwd + rev) * (hm.matrix[iu] - 1))),
        peak=float(off.max()),
        n=t.n,
        h_avg=hm.average,
        h_max=hm.h_max,
    )


def _common(st: _PairStats, p: DeviceParams, r_low: float, coded_peak: float) -> tuple[float, float, float]:
    """(equal-traffic lower, full-mesh lower, joint upper) shared by both modes.

    The equal-traffic bound charges every interior unit at r/2 per
    direction, which is what balanced pairs cost. It weights each demand by
    its own hop count: with the network-average hop count instead it stops
    being a bound once large demands sit on short paths. For equal demands
    the two forms coincide.
    """
    c = per_gbps_hop(p)
    pairs = st.n * (st.n - 1)
    lower_equal = c * (st.mean * pairs + r_low / 2 * st.hop_weighted)
    lower_mesh = c * st.mean * pairs
    upper_joint = c * st.peak * pairs * (1 + coded_peak * (st.h_max - 1) / 2)
    return lower_equal, lower_mesh, upper_joint


def bounds_zero_pad(t: Topology, dm: DemandMatrix, p: DeviceParams, r: float | None = None) -> BoundSet:
    """Bounds on the zero-padded coded network.

    Per pair the end nodes cost at most 2·max(λsd, λds) and each interior
    node at most r·max(λsd, λds) in single-hop units; replacing the larger
    direction by the peak demand or each hop count by the diameter gives
    the upper bounds. The lower bounds assume perfectly balanced pairs or
    collapse the topology to a full mesh.
    """
    r = p.port_ratio if r is None else r
    _check_nonneg("r", r)
    st = _pair_stats(t, dm)
    c = per_gbps_hop(p)
    pairs = st.n * (st.n - 1)
    lower_equal, lower_mesh, upper_joint = _common(st, p, r, r)
    upper_traffic = c * st.peak * pairs * (1 + r * (st.h_avg - 1) / 2)
    upper_hop = c * float(np.sum(st.hi * (2 + r * (st.h_max - 1))))
    return BoundSet(lower_equal, lower_mesh, upper_traffic, upper_hop, upper_joint)


def partition_weight(hi, lo, r: float):
    """Interior cost of a pair under partitioning, in single-hop units.

    The common part costs r, the excess of the larger direction costs 1.
    """
    return hi + (r - 1) * lo


def bounds_partition(t: Topology, dm: DemandMatrix, p: DeviceParams, r: float | None = None) -> BoundSet:
    """Bounds on the partitioned coded network.

    Aggregating pairs at a node can only enlarge the coded share, which
    lowers the cost when r <= 2; above 2 every interior unit is charged at
    r·max instead. Fully one-directional traffic is the costliest case for
    a given peak, at max(1, r) per interior unit.
    """
    r = p.port_ratio if r is None else r
    _check_nonneg("r", r)
    st = _pair_stats(t, dm)
    c = per_gbps_hop(p)
    pairs = st.n * (st.n - 1)
    coded_peak = max(1.0, r)
    # beyond r = 2 a partitioned pair costs at least its two uncoded directions
    lower_equal, lower_mesh, upper_joint = _common(st, p, min(r, 2.0), coded_peak)
    upper_traffic = c * st.peak * pairs * (1 + coded_peak * (st.h_avg - 1) / 2)
    interior = partition_weight(st.hi, st.lo, r) if r <= 2 else r * st.hi
    upper_hop = c * float(np.sum(2 * st.hi + (st.h_max - 1) * interior))
    return BoundSet(lower_equal, lower_mesh, upper_traffic, upper_hop, upper_joint)


def bounds(t: Topology, dm: DemandMatrix, p: DeviceParams, mode: str, r: float | None = None) -> BoundSet:
    if mode == "zero_pad":
        return bounds_zero_pad(t, dm, p, r)
    if mode == "partition":
        return bounds_partition(t, dm, p, r)
    raise ParameterError(f"mode must be zero_pad or partition, got {mode!r}")
