"""Port, transponder and amplifier accounting for conventional and coded networks."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from ncpower.errors import CapacityError, ParameterError, TopologyError
from ncpower.netmodel import Topology, edfa_count
from ncpower.routing import RoutePlan

SCHEMES = ("conventional", "nc")
LAYERS = ("non_bypass", "bypass")
MODES = ("zero_pad", "partition")


@dataclass(frozen=True)
class DeviceParams:
    """Device power figures (W), wavelengths per fibre, Gbps per wavelength, km per span.

    ``Px`` may drop below zero in sensitivity sweeps, but ``Px + Pt`` may not.
    """

    Pp: float
    Px: float
    Pt: float
    Pe: float
    Po: float
    Pmd: float
    W: int
    B: float
    S: float

    def __post_init__(self):
        for name in ("Pp", "Pt", "B", "S"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ParameterError(f"{name} must be positive, got {v!r}")
        for name in ("Pe", "Po", "Pmd"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ParameterError(f"{name} must be >= 0, got {v!r}")
        if not (math.isfinite(self.Px) and self.Px + self.Pt >= 0):
            raise ParameterError(f"Px + Pt must be >= 0, got Px={self.Px!r}")
        if int(self.W) != self.W or self.W < 1:
            raise ParameterError(f"W must be a positive integer, got {self.W!r}")

    @property
    def port_ratio(self) -> float:
        return (self.Px + self.Pt) / (self.Pp + self.Pt)

    def with_port_ratio(self, r: float) -> "DeviceParams":
        if r < 0:
            raise ParameterError("port ratio must be >= 0")
        return replace(self, Px=r * (self.Pp + self.Pt) - self.Pt)

    def with_(self, **kw) -> "DeviceParams":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "DeviceParams":
        try:
            return cls(**{k: data[k] for k in ("Pp", "Px", "Pt", "Pe", "Po", "Pmd", "W", "B", "S")})
        except KeyError as exc:
            raise ParameterError(f"missing device parameter {exc}") from None


TABLE4 = DeviceParams(Pp=1000.0, Px=1100.0, Pt=73.0, Pe=8.0, Po=85.0, Pmd=16.0, W=16, B=40.0, S=80.0)
TABLE5_GREENTOUCH = DeviceParams(
    Pp=46.7, Px=360.0, Pt=332.6, Pe=15.3, Po=8.5, Pmd=16.0, W=32, B=400.0, S=80.0
)
PRESETS = {"table4": TABLE4, "table5_greentouch": TABLE5_GREENTOUCH}


def load_params(spec: str | Path) -> DeviceParams:
    """Preset name or path to a JSON object with every DeviceParams field."""
    if str(spec) in PRESETS:
        return PRESETS[str(spec)]
    try:
        with open(spec, encoding="utf-8") as fh:
            return DeviceParams.from_dict(json.load(fh))
    except FileNotFoundError:
        raise ParameterError(f"unknown parameter preset or file {spec!r}") from None
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{spec}: invalid JSON ({exc})") from None


@dataclass(frozen=True)
class PortCounts:
    """Port units per (node, neighbour) and per node."""

    per_link: dict[tuple[int, int], float]
    Y: dict[int, float]


@dataclass(frozen=True)
class NCPortCounts:
    """Ports of a coding network.

    ``per_link`` and ``Y`` are conventional port units, ``X`` coded port
    units and ``residual`` the uncoded transit traffic (in wavelength
    units) that partitioning leaves at each node.
    """

    per_link: dict[tuple[int, int], float]
    Y: dict[int, float]
    X: dict[int, float]
    residual: dict[int, float]


@dataclass(frozen=True)
class PowerBreakdown:
    router_ports_W: float
    nc_ports_W: float
    transponders_W: float
    edfas_W: float
    switches_W: float
    muxdemux_W: float
    total_W: float
    Y: dict[int, float] = field(default_factory=dict)
    X: dict[int, float] = field(default_factory=dict)
    scheme: str = "conventional"
    layer: str = "non_bypass"
    mode: str = "zero_pad"

    @property
    def core_W(self) -> float:
        """Router ports, coded ports and transponders only."""
        return self.router_ports_W + self.nc_ports_W + self.transponders_W

    def components(self) -> tuple[float, ...]:
        return (self.router_ports_W, self.nc_ports_W, self.transponders_W,
                self.edfas_W, self.switches_W, self.muxdemux_W)

    def csv_row(self, hour: int | str = "") -> list[str]:
        vals = [*self.components(), self.total_W]
        return [str(hour), self.scheme, self.layer, self.mode] + [f"{v:.6f}" for v in vals]


CSV_HEADER = ["hour", "scheme", "layer", "mode", "router_W", "nc_W",
              "transponder_W", "edfa_W", "switch_W", "mux_W", "total_W"]


def _units(x: float, integral: bool) -> float:
    return math.ceil(x - 1e-9) if integral else x


def _end_ports(plan: RoutePlan) -> dict[tuple[int, int], float]:
    """Gbps of router port needed at (m, n) for traffic added or dropped at m.

    A port pairs one transmitter with one receiver, so the larger of the
    two directions sets its size.
    """
    added, dropped = plan.end_loads()
    return {e: max(added.get(e, 0.0), dropped.get(e, 0.0)) for e in plan.link_load}


def port_counts_conventional(plan: RoutePlan, B: float, integral: bool = False) -> PortCounts:
    """Conventional router ports at each (node, neighbour).

    Added and dropped traffic is sized by the larger direction. Transit
    traffic needs a receiver on the inbound side and a transmitter on the
    outbound side, i.e. half a port on each, so one port per hop overall.
    """
    added, dropped = plan.end_loads()
    ends = _end_ports(plan)
    per_link = {}
    Y: dict[int, float] = {m: 0.0 for m in range(1, plan.topology.n + 1)}
    for (m, n), w_out in sorted(plan.link_load.items()):
        w_in = plan.link_load.get((n, m), 0.0)
        transit = (w_out - added.get((m, n), 0.0)) + (w_in - dropped.get((m, n), 0.0))
        units = _units((ends[(m, n)] + 0.5 * transit) / B, integral)
        per_link[(m, n)] = units
        Y[m] += units
    return PortCounts(per_link, Y)


def nc_port_counts(plan: RoutePlan, B: float, mode: str = "zero_pad", integral: bool = False) -> NCPortCounts:
    """Ports of a network that codes at every intermediate node.

    End ports are as in the conventional network. ``zero_pad`` sizes each
    triple's coded port by its larger direction; ``partition`` by the
    smaller one and forwards the excess conventionally, at one port per
    wavelength like any transit flow.
    """
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    n_nodes = plan.topology.n
    per_link = {}
    Y = {m: 0.0 for m in range(1, n_nodes + 1)}
    X = dict(Y)
    residual = dict(Y)
    for e, v in sorted(_end_ports(plan).items()):
        units = _units(v / B, integral)
        per_link[e] = units
        Y[e[0]] += units
    for tr in plan.coding_triples:
        if mode == "zero_pad":
            X[tr.m] += _units(tr.hi / B, integral)
        else:
            X[tr.m] += _units(tr.lo / B, integral)
            res = _units((tr.hi - tr.lo) / B, integral)
            residual[tr.m] += res
            Y[tr.m] += res
    return NCPortCounts(per_link, Y, X, residual)


def _check_mode(scheme: str, layer: str, mode: str) -> None:
    if scheme not in SCHEMES:
        raise ParameterError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if layer not in LAYERS:
        raise ParameterError(f"layer must be one of {LAYERS}, got {layer!r}")
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")


def fibre_counts(plan: RoutePlan, p: DeviceParams) -> dict[tuple[int, int], int]:
    """Fibres per direction: ceil((w/B)/W), and at least one on any loaded link."""
    return {e: max(1, math.ceil(w / p.B / p.W - 1e-12)) if w > 0 else 0 for e, w in plan.link_load.items()}


def _optical_terms(t: Topology, plan: RoutePlan, p: DeviceParams, fibre_limit: int | None):
    fibres = fibre_counts(plan, p)
    edfa_w = 0.0
    for e, f in fibres.items():
        w = plan.link_load[e]
        if w > p.W * p.B * f * (1 + 1e-12):
            raise CapacityError(f"link {e} carries {w} Gbps over {f} fibres")
        if fibre_limit is not None and f > fibre_limit:
            raise CapacityError(f"link {e} needs {f} fibres, limit is {fibre_limit}")
        edfa_w += p.Pe * edfa_count(t.length(*e), p.S) * f
    return edfa_w, p.Po * t.n, p.Pmd * t.n


def network_power(
    t: Topology,
    plan: RoutePlan,
    p: DeviceParams,
    scheme: str = "conventional",
    layer: str = "non_bypass",
    mode: str = "zero_pad",
    integral: bool = False,
    fibre_limit: int | None = None,
) -> PowerBreakdown:
    """Total power of a routed network under one scheme, layer and coding mode."""
    _check_mode(scheme, layer, mode)
    if plan.topology != t:
        raise TopologyError("route plan was built on a different topology")
    B = p.B
    n = t.n
    edfa_w, switch_w, mux_w = _optical_terms(t, plan, p, fibre_limit)

    added, _ = plan.end_loads()
    # one transmitter per Gbps of traffic entering the network
    first_hop = sum(_units(v / B, integral) for v in added.values())
    if layer == "non_bypass":
        if scheme == "conventional":
            Y = port_counts_conventional(plan, B, integral).Y
            X = {m: 0.0 for m in range(1, n + 1)}
            trans_units = sum(_units(w / B, integral) for w in plan.link_load.values())
        else:
            ncp = nc_port_counts(plan, B, mode, integral)
            Y, X = ncp.Y, ncp.X
            # coded streams and partition residuals each need a transmitter
            trans_units = first_hop + sum(X.values()) + sum(ncp.residual.values())
        nc_units = sum(X.values())
    else:
        # optical bypass: routers only add and drop; intermediate nodes
        # terminate both directions (conventional) or code them
        Y = {m: 0.0 for m in range(1, n + 1)}
        for (m, _), v in _end_ports(plan).items():
            Y[m] += _units(v / B, integral)
        X = {m: 0.0 for m in range(1, n + 1)}
        trans_units = first_hop
        nc_units = 0.0
        for tr in plan.coding_triples:
            hi, lo = _units(tr.hi / B, integral), _units(tr.lo / B, integral)
            if scheme == "conventional":
                trans_units += 2 * hi
            elif mode == "zero_pad":
                nc_units += hi
                X[tr.m] += hi
            else:
                nc_units += lo
                X[tr.m] += lo
                trans_units += 2 * (hi - lo)
    router_w = p.Pp * sum(Y.values())
    nc_w = p.Px * nc_units
    trans_w = p.Pt * trans_units

    total = router_w + nc_w + trans_w + edfa_w + switch_w + mux_w
    return PowerBreakdown(router_w, nc_w, trans_w, edfa_w, switch_w, mux_w, total,
                          dict(Y), dict(X), scheme, layer, mode)


def savings(reference: PowerBreakdown | float, candidate: PowerBreakdown | float) -> float:
    """1 - candidate/reference on total power."""
    ref = reference.total_W if isinstance(reference, PowerBreakdown) else reference
    cand = candidate.total_W if isinstance(candidate, PowerBreakdown) else candidate
    return 1.0 - cand / ref if ref > 0 else 0.0


def sweep_port_ratio(
    t: Topology,
    plan: RoutePlan,
    p: DeviceParams,
    mode: str,
    r_values: Iterable[float],
    layer: str = "non_bypass",
) -> list[tuple[float, float]]:
    """Coded-network total for each port ratio r, with Px solved from r."""
    out = []
    for r in r_values:
        pr = p.with_port_ratio(r)
        out.append((float(r), network_power(t, plan, pr, "nc", layer, mode).total_W))
    return out


def port_ratio_crossover(
    t: Topology, plans: Sequence[RoutePlan], p: DeviceParams, mode: str, layer: str = "non_bypass"
) -> float:
    """Port ratio at which the summed coded power equals the summed conventional power.

    Fractional accounting makes the coded total affine in Px, so two
    evaluations pin the crossing exactly. Returns ``inf`` when coding never
    costs more (no coding triples carry traffic).
    """
    conv = sum(network_power(t, pl, p, "conventional", layer, mode).total_W for pl in plans)
    r0, r1 = 1.0, 2.0
    n0 = sum(network_power(t, pl, p.with_port_ratio(r0), "nc", layer, mode).total_W for pl in plans)
    n1 = sum(network_power(t, pl, p.with_port_ratio(r1), "nc", layer, mode).total_W for pl in plans)
    slope = (n1 - n0) / (r1 - r0)
    if slope <= 0:
        return math.inf
    return r0 + (conv - n0) / slope


def coded_px_crossover(
    t: Topology, plans: Sequence[RoutePlan], p: DeviceParams, mode: str, layer: str = "bypass"
) -> float:
    """Px at which the summed coded power equals the summed conventional power."""
    conv = sum(network_power(t, pl, p, "conventional", layer, mode).total_W for pl in plans)
    x0, x1 = 0.0, 1000.0
    n0 = sum(network_power(t, pl, p.with_(Px=x0), "nc", layer, mode).total_W for pl in plans)
    n1 = sum(network_power(t, pl, p.with_(Px=x1), "nc", layer, mode).total_W for pl in plans)
    slope = (n1 - n0) / (x1 - x0)
    if slope <= 0:
        return math.inf
    return x0 + (conv - n0) / slope

