"""Command-line front end: topology, traffic, routing, then power, bounds or MILP files."""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean
from typing import Sequence

from ncpower import __version__
from ncpower.analytics import bounds
from ncpower.errors import NCPowerError, SolutionError
from ncpower.netmodel import Topology, build_regular, load_topology, nsfnet, usnet
from ncpower.power import (
    CSV_HEADER,
    LAYERS,
    MODES,
    SCHEMES,
    DeviceParams,
    load_params,
    network_power,
    port_ratio_crossover,
    savings,
)
from ncpower.routing import RoutePlan, route_all
from ncpower.traffic import DemandMatrix, generate_matrix, read_demand_csv

EXIT_OK = 0
EXIT_INVALID = 2


class ConfigError(NCPowerError):
    """Command-line configuration is inconsistent."""


def f6(x: float) -> str:
    return f"{x:.6f}"


def parse_int_set(text: str, lo: int, hi: int, what: str) -> list[int]:
    """``all``, ``a-b``, ``a-b:step`` or comma-separated mixes of those."""
    text = text.strip()
    if text == "all":
        return list(range(lo, hi + 1))
    out: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        try:
            if "-" in part:
                rng, _, step = part.partition(":")
                a, b = (int(x) for x in rng.split("-", 1))
                out.update(range(a, b + 1, int(step) if step else 1))
            else:
                out.add(int(part))
        except ValueError:
            raise ConfigError(f"cannot parse {what} {part!r}") from None
    bad = [x for x in out if not lo <= x <= hi]
    if bad or not out:
        raise ConfigError(f"{what} must be non-empty and within {lo}..{hi}, got {sorted(out)}")
    return sorted(out)


def parse_topology(spec: str) -> Topology:
    """``nsfnet``, ``usnet``, ``ring:N``, ``line:N``, ``star:N[:center]``, ``full_mesh:N`` or a JSON path."""
    if spec == "nsfnet":
        return nsfnet()
    if spec == "usnet":
        return usnet()
    kind, _, rest = spec.partition(":")
    if kind in ("ring", "line", "star", "full_mesh", "mesh") and rest:
        try:
            bits = [int(x) for x in rest.split(":")]
        except ValueError:
            raise ConfigError(f"cannot parse topology {spec!r}") from None
        center = bits[1] if len(bits) > 1 else (1 if kind == "star" else None)
        return build_regular(kind, bits[0], center=center)
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"unknown topology {spec!r} (not a builtin name or an existing file)")
    return load_topology(path)


def _choices(value: str, allowed: Sequence[str], what: str) -> list[str]:
    if value == "all":
        return list(allowed)
    vals = [v.strip() for v in value.split(",")]
    bad = [v for v in vals if v not in allowed]
    if bad:
        raise ConfigError(f"{what} must be among {allowed} or 'all', got {bad}")
    return vals


@dataclass
class RunConfig:
    topology: Topology
    hours: list[int]
    seeds: list[int]
    params: DeviceParams
    schemes: list[str]
    layers: list[str]
    modes: list[str]
    out: Path
    demand: DemandMatrix | None = None

    def matrices(self):
        """(hour, seed, matrix) in sorted order; a demand file replaces generation."""
        if self.demand is not None:
            yield self.demand.hour or 0, self.demand.seed or 0, self.demand
            return
        for h in self.hours:
            for s in self.seeds:
                yield h, s, generate_matrix(self.topology, h, s)

    def plans(self) -> list[tuple[int, int, RoutePlan]]:
        return [(h, s, route_all(self.topology, dm)) for h, s, dm in self.matrices()]


def config_from_args(args) -> RunConfig:
    t = parse_topology(args.topology)
    demand = None
    if getattr(args, "demand", None):
        demand = read_demand_csv(args.demand, t.n)
    cfg = RunConfig(
        topology=t,
        hours=parse_int_set(args.hours, 0, 23, "hours"),
        seeds=parse_int_set(args.seeds, 0, 2**31 - 1, "seeds"),
        params=load_params(args.params),
        schemes=_choices(getattr(args, "scheme", "all"), SCHEMES, "scheme"),
        layers=_choices(getattr(args, "layer", "non_bypass"), LAYERS, "layer"),
        modes=_choices(getattr(args, "mode", "zero_pad"), MODES, "mode"),
        out=Path(getattr(args, "out", ".") or "."),
        demand=demand,
    )
    return cfg


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _regimes(cfg: RunConfig):
    for layer in cfg.layers:
        for scheme in cfg.schemes:
            for mode in cfg.modes if scheme == "nc" else cfg.modes[:1]:
                yield scheme, layer, mode


def cmd_daily(cfg: RunConfig) -> dict:
    """Per-hour power for each regime plus per-hour and daily-mean savings.

    Savings compare each coded regime against the conventional network on
    the same layer and against the conventional non-bypass network.
    """
    t, p = cfg.topology, cfg.params
    power_rows = []
    saving: dict[tuple[str, str, str], dict[int, list[tuple[float, float]]]] = {}
    for h, s, plan in cfg.plans():
        conv = {layer: network_power(t, plan, p, "conventional", layer) for layer in LAYERS}
        for scheme, layer, mode in _regimes(cfg):
            pb = network_power(t, plan, p, scheme, layer, mode)
            row = pb.csv_row(h)
            if scheme == "conventional":
                row[3] = "none"
            power_rows.append([row[0], str(s)] + row[1:])
            if scheme == "nc":
                saving.setdefault((layer, scheme, mode), {}).setdefault(h, []).append(
                    (savings(conv[layer], pb), savings(conv["non_bypass"], pb)))
    _write_csv(cfg.out / "daily_power.csv", ["hour", "seed"] + CSV_HEADER[1:], power_rows)

    rows, summary = [], {}
    for (layer, scheme, mode), by_hour in sorted(saving.items()):
        same, ref = [], []
        for h in sorted(by_hour):
            a = fmean(x for x, _ in by_hour[h])
            b = fmean(y for _, y in by_hour[h])
            same.append(a)
            ref.append(b)
            rows.append([str(h), scheme, layer, mode, f6(a), f6(b)])
        rows.append(["mean", scheme, layer, mode, f6(fmean(same)), f6(fmean(ref))])
        summary[f"{scheme}/{layer}/{mode}"] = (fmean(same), fmean(ref))
    _write_csv(cfg.out / "daily_savings.csv",
               ["hour", "scheme", "layer", "mode", "saving_vs_conventional_same_layer",
                "saving_vs_conventional_non_bypass"], rows)
    return summary


def cmd_sweep_r(cfg: RunConfig, r_min: float, r_max: float, steps: int) -> dict:
    """Ensemble-summed coded and conventional power across port ratios."""
    if steps < 1 or r_min < 0 or r_max < r_min:
        raise ConfigError("need 0 <= r_min <= r_max and steps >= 1")
    t, p = cfg.topology, cfg.params
    plans = [pl for _, _, pl in cfg.plans()]
    layer = cfg.layers[0]
    conv = sum(network_power(t, pl, p, "conventional", layer).total_W for pl in plans)
    rs = [r_min + (r_max - r_min) * i / steps for i in range(steps + 1)] if steps else [r_min]
    rows, crossings = [], {}
    for mode in cfg.modes:
        for r in rs:
            pr = p.with_port_ratio(r)
            nc = sum(network_power(t, pl, pr, "nc", layer, mode).total_W for pl in plans)
            rows.append([f6(r), mode, layer, f6(conv), f6(nc), f6(1 - nc / conv)])
        crossings[mode] = port_ratio_crossover(t, plans, p, mode, layer)
    _write_csv(cfg.out / "sweep_r.csv", ["r", "mode", "layer", "conventional_W", "nc_W", "saving"], rows)
    return crossings


def cmd_bounds(cfg: RunConfig) -> int:
    """Bounds and the routed model value under the reduced accounting; returns failures."""
    t, p = cfg.topology, cfg.params
    rows, failures = [], 0
    for h, s, dm in cfg.matrices():
        plan = route_all(t, dm)
        for mode in cfg.modes:
            value = network_power(t, plan, p, "nc", "non_bypass", mode).core_W
            b = bounds(t, dm, p, mode)
            ok = b.contains(value)
            failures += not ok
            for name, w in b.as_rows():
                rows.append([str(h), str(s), mode, name, f6(w)])
            rows.append([str(h), str(s), mode, "model", f6(value)])
    _write_csv(cfg.out / "bounds.csv", ["hour", "seed", "mode", "bound_name", "watts"], rows)
    return failures


def _single_matrix(cfg: RunConfig) -> DemandMatrix:
    if cfg.demand is not None:
        return cfg.demand
    if len(cfg.hours) != 1 or len(cfg.seeds) != 1:
        raise ConfigError("MILP commands need exactly one hour and one seed (or --demand)")
    return generate_matrix(cfg.topology, cfg.hours[0], cfg.seeds[0])


def cmd_milp_export(cfg: RunConfig, model_mode: str, out_file: Path,
                    assignment_file: Path | None = None) -> Path:
    from ncpower.milp import build_model, export_model, plan_assignment, write_solution

    dm = _single_matrix(cfg)
    ir = build_model(cfg.topology, dm, cfg.params, model_mode)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    export_model(ir, out_file)
    if assignment_file is not None:
        vals = plan_assignment(ir, cfg.topology, route_all(cfg.topology, dm), cfg.params)
        write_solution(vals, ir.evaluate(vals), assignment_file)
    return out_file


def cmd_milp_check(cfg: RunConfig, model_mode: str, solution_file: Path) -> list[tuple[str, bool, str]]:
    """Import a solution, report feasibility, and compare with the oracle when small enough."""
    from ncpower.errors import InstanceTooLargeError
    from ncpower.milp import brute_force_optimum, build_model, import_solution, mode_parts

    dm = _single_matrix(cfg)
    t, p = cfg.topology, cfg.params
    ir = build_model(t, dm, p, model_mode)
    report = []
    try:
        sol = import_solution(ir, solution_file)
        report.append(("feasible", True, f"objective {sol.objective:.6f}"))
    except SolutionError as exc:
        report.append(("feasible", False, str(exc)))
        return report
    scheme, nc_mode = mode_parts(model_mode)
    heur = network_power(t, route_all(t, dm), p, scheme, "non_bypass", nc_mode).total_W
    report.append(("not_worse_than_heuristic", sol.objective <= heur * (1 + 1e-6),
                   f"heuristic {heur:.6f}"))
    try:
        oracle = brute_force_optimum(t, dm, p, model_mode)
    except InstanceTooLargeError as exc:
        report.append(("oracle", True, f"skipped: {exc}"))
        return report
    gap = abs(sol.objective - oracle.power_W) / oracle.power_W
    report.append(("matches_oracle", gap <= 1e-4, f"oracle {oracle.power_W:.6f}, relative gap {gap:.2e}"))
    return report


def _common_args(sp, regimes: bool = True) -> None:
    sp.add_argument("--topology", default="nsfnet",
                    help="nsfnet, usnet, ring:N, line:N, star:N[:center], full_mesh:N or a JSON file")
    sp.add_argument("--hours", default="0-22:2", help="e.g. all, 0-22:2, 3,9,22")
    sp.add_argument("--seeds", default="0-4", help="e.g. 0-4 or 1,7")
    sp.add_argument("--params", default="table4", help="table4, table5_greentouch or a JSON file")
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--demand", help="demand CSV (s,d,gbps) used instead of generated matrices")
    if regimes:
        sp.add_argument("--scheme", default="all", help="conventional, nc or all")
        sp.add_argument("--layer", default="non_bypass", help="non_bypass, bypass or all")
        sp.add_argument("--mode", default="zero_pad", help="zero_pad, partition or all")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncpower", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("daily", help="per-hour power and savings over a day")
    _common_args(sp)

    sp = sub.add_parser("sweep-r", help="coded power against the port ratio r")
    _common_args(sp)
    sp.add_argument("--r-min", type=float, default=0.5)
    sp.add_argument("--r-max", type=float, default=2.5)
    sp.add_argument("--steps", type=int, default=20)

    sp = sub.add_parser("bounds", help="analytic bounds next to the routed model value")
    _common_args(sp)
    sp.set_defaults(mode="all")

    for name, helptext in (("milp-export", "write the MILP as an LP file"),
                           ("milp-check", "verify a solver solution against the MILP")):
        sp = sub.add_parser(name, help=helptext)
        _common_args(sp, regimes=False)
        sp.set_defaults(hours="22", seeds="0", topology="ring:5")
        sp.add_argument("--model-mode", default="nc_zero_pad",
                        choices=("conventional", "nc_zero_pad", "nc_partition"))
        if name == "milp-export":
            sp.add_argument("--model", default="model.lp", help="LP file to write")
            sp.add_argument("--assignment", help="also write the min-hop plan as a solution file")
        else:
            sp.add_argument("--solution", required=True, help="solution file to verify")

    sp = sub.add_parser("validate", help="run the invariant suite")
    sp.add_argument("--only", action="append", help="run just this check (repeatable)")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            from ncpower.validate import run_all

            results = run_all(args.only)
            for r in results:
                print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<22} {r.seconds:6.2f}s  {r.detail}")
            return EXIT_OK if all(r.passed for r in results) else EXIT_INVALID

        cfg = config_from_args(args)
        if args.command == "daily":
            for key, (same, ref) in cmd_daily(cfg).items():
                print(f"{key}: mean saving {same:.6f} (vs conventional non_bypass {ref:.6f})")
        elif args.command == "sweep-r":
            for mode, r in cmd_sweep_r(cfg, args.r_min, args.r_max, args.steps).items():
                print(f"{mode}: crossover r = {r:.6f}")
        elif args.command == "bounds":
            failures = cmd_bounds(cfg)
            print(f"bounds written to {cfg.out / 'bounds.csv'}; sandwich failures: {failures}")
            return EXIT_OK if failures == 0 else EXIT_INVALID
        elif args.command == "milp-export":
            path = cmd_milp_export(cfg, args.model_mode, cfg.out / args.model,
                                   cfg.out / args.assignment if args.assignment else None)
            print(f"model written to {path}")
        elif args.command == "milp-check":
            report = cmd_milp_check(cfg, args.model_mode, Path(args.solution))
            for name, ok, detail in report:
                print(f"{'PASS' if ok else 'FAIL'}  {name:<26} {detail}")
            return EXIT_OK if all(ok for _, ok, _ in report) else EXIT_INVALID
    except NCPowerError as exc:
        print(f"ncpower: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
