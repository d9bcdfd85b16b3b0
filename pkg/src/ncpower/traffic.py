"""Time-of-day traffic profile and demand-matrix generation."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np

from ncpower.errors import DemandError, ParameterError
from ncpower.netmodel import ZONES, Topology

LAMBDA_MIN = 10.0
LAMBDA_MAX = 230.0

# mean Gbps per node pair, hours 0..23, for sources in the eastern zone
_EST_SERIES = (
    40, 35, 30, 30, 35, 25, 20, 30, 40, 80, 110, 100,
    90, 90, 90, 100, 110, 105, 100, 90, 80, 95, 120, 80,
)
# each western zone lags the eastern curve by this many hours
ZONE_LAG = {"EST": 0, "CST": 1, "MST": 2, "PST": 3}


def zone_profile(zone: str, hour: int) -> float:
    """Average per-pair demand (Gbps) for sources in ``zone`` at ``hour``."""
    if zone not in ZONE_LAG:
        raise ParameterError(f"unknown zone {zone!r}")
    if not (0 <= hour <= 23):
        raise ParameterError(f"hour must be in 0..23, got {hour!r}")
    return float(_EST_SERIES[(hour - ZONE_LAG[zone]) % 24])


def zone_profile_table() -> dict[str, tuple[float, ...]]:
    return {z: tuple(zone_profile(z, h) for h in range(24)) for z in ZONES}


@dataclass(frozen=True)
class DemandMatrix:
    """Ordered-pair demands in Gbps; ``values[s-1, d-1]`` is the demand s to d.

    The diagonal is held at zero and never read.
    """

    values: np.ndarray
    hour: int | None = None
    seed: int | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 2:
            raise DemandError(f"demand matrix must be square with n >= 2, got shape {v.shape}")
        np.fill_diagonal(v, 0.0)
        if not np.isfinite(v).all():
            raise DemandError("demand matrix contains non-finite entries")
        if (v < 0).any():
            s, d = np.argwhere(v < 0)[0] + 1
            raise DemandError(f"negative demand {v[s - 1, d - 1]} for pair ({s},{d})")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, sd: tuple[int, int]) -> float:
        s, d = sd
        if s == d:
            raise KeyError(sd)
        return float(self.values[s - 1, d - 1])

    def pairs(self) -> Iterator[tuple[int, int]]:
        for s in range(1, self.n + 1):
            for d in range(1, self.n + 1):
                if s != d:
                    yield s, d

    def total(self) -> float:
        return float(self.values.sum())

    def offdiag(self) -> np.ndarray:
        mask = ~np.eye(self.n, dtype=bool)
        return self.values[mask]

    def is_symmetric(self, tol: float = 0.0) -> bool:
        return bool(np.abs(self.values - self.values.T).max() <= tol)

    def scaled(self, factor: float) -> "DemandMatrix":
        return DemandMatrix(self.values * factor, self.hour, self.seed, self.label)

    @classmethod
    def from_mapping(cls, n: int, entries: Mapping[tuple[int, int], float], **kw) -> "DemandMatrix":
        v = np.zeros((n, n))
        for (s, d), x in entries.items():
            if not (1 <= s <= n and 1 <= d <= n) or s == d:
                raise DemandError(f"invalid pair ({s},{d}) for n={n}")
            v[s - 1, d - 1] = x
        return cls(v, **kw)


def sampling_interval(mu: float) -> tuple[float, float]:
    """Uniform support centred on ``mu`` that stays inside [10, 230]."""
    lo = max(LAMBDA_MIN, 2 * mu - LAMBDA_MAX)
    hi = min(LAMBDA_MAX, 2 * mu - LAMBDA_MIN)
    return lo, hi


def generate_matrix(t: Topology, hour: int, seed: int) -> DemandMatrix:
    """Random demands whose ensemble mean per source zone follows the profile.

    Each pair draws from its own stream keyed by (seed, hour, s, d), so the
    result does not depend on the order pairs are visited in.
    """
    if not (0 <= hour <= 23):
        raise ParameterError(f"hour must be in 0..23, got {hour!r}")
    if seed < 0:
        raise ParameterError("seed must be non-negative")
    n = t.n
    v = np.zeros((n, n))
    for s in range(1, n + 1):
        lo, hi = sampling_interval(zone_profile(t.zone(s), hour))
        for d in range(1, n + 1):
            if s == d:
                continue
            rng = np.random.default_rng(np.random.SeedSequence([seed, hour, s, d]))
            v[s - 1, d - 1] = rng.uniform(lo, hi)
    return DemandMatrix(v, hour, seed, t.name)


def equal_matrix(n: int, gbps: float) -> DemandMatrix:
    if n < 2:
        raise ParameterError("n must be >= 2")
    if not (gbps >= 0 and math.isfinite(gbps)):
        raise ParameterError(f"lambda must be a finite value >= 0, got {gbps!r}")
    return DemandMatrix(np.full((n, n), float(gbps)))


def zone_mean_deviation(t: Topology, dm: DemandMatrix, hour: int) -> dict[str, float]:
    """Relative deviation of one matrix's per-source-zone mean from the profile."""
    out = {}
    for z in ZONES:
        srcs = [m for m in range(1, t.n + 1) if t.zone(m) == z]
        if not srcs:
            continue
        vals = [dm[s, d] for s in srcs for d in range(1, t.n + 1) if d != s]
        mu = zone_profile(z, hour)
        out[z] = float(np.mean(vals)) / mu - 1.0
    return out


def write_demand_csv(dm: DemandMatrix, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "d", "gbps"])
        for s, d in dm.pairs():
            w.writerow([s, d, f"{dm[s, d]:.6f}"])


def read_demand_csv(path: str | Path, n: int | None = None) -> DemandMatrix:
    """Load an ``s,d,gbps`` file; every ordered pair must appear exactly once."""
    rows: dict[tuple[int, int], float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["s", "d", "gbps"]:
            raise DemandError(f"{path}: header must be 's,d,gbps'")
        for lineno, row in enumerate(reader, start=2):
            try:
                s, d, x = int(row["s"]), int(row["d"]), float(row["gbps"])
            except (TypeError, ValueError):
                raise DemandError(f"{path}:{lineno}: cannot parse row {row}") from None
            if not (math.isfinite(x) and x >= 0):
                raise DemandError(f"{path}:{lineno}: demand must be finite and >= 0, got {x}")
            if s == d:
                raise DemandError(f"{path}:{lineno}: self-demand ({s},{d})")
            if (s, d) in rows:
                raise DemandError(f"{path}:{lineno}: duplicate pair ({s},{d})")
            rows[(s, d)] = x
    size = n if n is not None else max((max(k) for k in rows), default=0)
    if size < 2:
        raise DemandError(f"{path}: no demands found")
    missing = [(s, d) for s in range(1, size + 1) for d in range(1, size + 1)
               if s != d and (s, d) not in rows]
    if missing:
        raise DemandError(f"{path}: {len(missing)} pairs missing, first {missing[0]}")
    return DemandMatrix.from_mapping(size, rows)
