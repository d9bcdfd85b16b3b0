"""LP-format export and solution import for ``ModelIR``."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ncpower.errors import NCPowerError, ObjectiveMismatchError, SolutionError
from ncpower.milp.ir import ModelIR

_LINE_WIDTH = 78
_CONST_VAR = "const_one"


def fmt(x: float) -> str:
    """12 significant digits, no trailing noise, ``-0`` folded to ``0``."""
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def _wrap(head: str, tokens: Iterable[str]) -> list[str]:
    lines, cur = [], head
    for tok in tokens:
        if len(cur) + 1 + len(tok) > _LINE_WIDTH and cur.strip():
            lines.append(cur)
            cur = "   "
        cur = f"{cur} {tok}"
    lines.append(cur)
    return lines


def _terms(items) -> list[str]:
    out = []
    for name, coef in items:
        sign = "-" if coef < 0 else "+"
        out.append(f"{sign} {fmt(abs(coef))} {name}")
    return out


def model_to_lp(m: ModelIR) -> str:
    """Render ``m`` as LP text with variables and constraints in name order.

    The objective constant is carried by a variable fixed at 1, since not
    every reader accepts a bare number in the objective.
    """
    obj = sorted(m.objective.items())
    if m.objective_constant:
        obj.append((_CONST_VAR, m.objective_constant))
    lines = [f"\\ {m.name}", "Minimize"]
    lines += _wrap(" obj:", _terms(obj) if obj else ["0", _CONST_VAR])
    lines.append("Subject To")
    for name in sorted(m.constraints):
        c = m.constraints[name]
        terms = _terms(sorted(c.terms)) or [f"0 {_CONST_VAR}"]
        lines += _wrap(f" {name}:", terms + [c.sense, fmt(c.rhs)])
    lines.append("Bounds")
    ints, bins = [], []
    for name in sorted(m.variables):
        v = m.variables[name]
        if v.kind == "binary":
            bins.append(name)
            continue
        if v.kind == "integer":
            ints.append(name)
        lb = "-inf" if v.lb == -math.inf else fmt(v.lb)
        ub = "+inf" if v.ub == math.inf else fmt(v.ub)
        lines.append(f" {lb} <= {name} <= {ub}")
    lines.append(f" {_CONST_VAR} = 1")
    if ints:
        lines.append("General")
        lines += _wrap("", ints)
    if bins:
        lines.append("Binary")
        lines += _wrap("", bins)
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_model(m: ModelIR, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.write_text(model_to_lp(m), encoding="utf-8")
    except OSError as exc:
        raise NCPowerError(f"cannot write model to {path}: {exc.strerror or exc}") from exc
    return path


@dataclass(frozen=True)
class Solution:
    values: dict[str, float]
    objective: float
    reported_objective: float | None


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf"
_OBJ_RE = re.compile(rf"objective(?:\s+value)?\s*[:=]?\s*({_NUM})", re.IGNORECASE)
_PAIR_RE = re.compile(rf"^\s*(?:\d+\s+)?([A-Za-z_][\w.\[\]]*)\s+({_NUM})(?:\s|$)")


def parse_solution_text(text: str) -> tuple[dict[str, float], float | None]:
    """Read ``name value`` lines and an objective line.

    Accepts the native ``# objective <v>`` header and the looser forms many
    solvers print (``Objective value: v``, ``Objective v``, column listings
    with a leading index). Lines that fit neither shape are skipped, and
    later values for a name replace earlier ones.
    """
    values: dict[str, float] = {}
    objective = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        mo = _OBJ_RE.search(line)
        if mo and (line.startswith("#") or line.lower().startswith("objective")):
            objective = float(mo.group(1))
            continue
        if line.startswith("#"):
            continue
        mp = _PAIR_RE.match(line)
        if mp and mp.group(1).lower() not in ("objective", "status", "model"):
            values[mp.group(1)] = float(mp.group(2))
    return values, objective


def write_solution(values: dict[str, float], objective: float, path: str | Path) -> Path:
    path = Path(path)
    lines = [f"# objective {objective:.12g}"] + [f"{k} {values[k]:.12g}" for k in sorted(values)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def check_assignment(m: ModelIR, values: dict[str, float], reported: float | None,
                     tol: float = 1e-6, rel_obj: float = 1e-6) -> Solution:
    """Verify feasibility and integrality, then compare the recomputed objective."""
    vals = {k: v for k, v in values.items() if k != _CONST_VAR}
    m.check(vals, tol)
    obj = m.evaluate(vals)
    if reported is not None and abs(obj - reported) > rel_obj * max(1.0, abs(obj)):
        raise ObjectiveMismatchError(reported, obj)
    return Solution(vals, obj, reported)


def import_solution(m: ModelIR, source: str | Path, tol: float = 1e-6) -> Solution:
    """Load a solution file for ``m`` and verify it; see ``check_assignment``."""
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise SolutionError(f"cannot read solution {source}: {exc.strerror or exc}") from exc
    values, reported = parse_solution_text(text)
    return check_assignment(m, values, reported, tol)
