"""Solver-agnostic linear model: variables, constraints and a linear objective."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from ncpower.errors import (
    ConstraintViolationError,
    IntegralityError,
    MissingVariableError,
    ParameterError,
)

KINDS = ("binary", "integer", "continuous")
SENSES = ("<=", "=", ">=")


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = "continuous"
    lb: float = 0.0
    ub: float = math.inf

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"variable kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "binary" and (self.lb, self.ub) != (0.0, 1.0):
            object.__setattr__(self, "lb", 0.0)
            object.__setattr__(self, "ub", 1.0)
        if self.lb > self.ub:
            raise ParameterError(f"variable {self.name}: lb {self.lb} > ub {self.ub}")


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[str, float], ...]
    sense: str
    rhs: float

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ParameterError(f"constraint sense must be one of {SENSES}, got {self.sense!r}")

    def activity(self, values: Mapping[str, float]) -> float:
        return math.fsum(coef * values[name] for name, coef in self.terms)

    def violation(self, values: Mapping[str, float]) -> float:
        """How far the assignment is outside the constraint (0 if satisfied)."""
        lhs = self.activity(values)
        if self.sense == "<=":
            return max(0.0, lhs - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass
class ModelIR:
    """A minimisation problem. ``objective_constant`` is added to the linear part."""

    name: str = "model"
    mode: str = ""
    variables: dict[str, Variable] = field(default_factory=dict)
    constraints: dict[str, Constraint] = field(default_factory=dict)
    objective: dict[str, float] = field(default_factory=dict)
    objective_constant: float = 0.0

    def add_var(self, name: str, kind: str = "continuous", lb: float = 0.0, ub: float = math.inf) -> str:
        if name in self.variables:
            raise ParameterError(f"duplicate variable {name}")
        self.variables[name] = Variable(name, kind, float(lb), float(ub))
        return name

    def add_constraint(self, name: str, terms, sense: str, rhs: float = 0.0) -> None:
        if name in self.constraints:
            raise ParameterError(f"duplicate constraint {name}")
        merged: dict[str, float] = {}
        for var, coef in terms:
            if var not in self.variables:
                raise ParameterError(f"constraint {name} uses unknown variable {var}")
            merged[var] = merged.get(var, 0.0) + float(coef)
        cleaned = tuple((v, c) for v, c in merged.items() if c != 0.0)
        self.constraints[name] = Constraint(name, cleaned, sense, float(rhs))

    def add_objective(self, var: str, coef: float) -> None:
        if var not in self.variables:
            raise ParameterError(f"objective uses unknown variable {var}")
        self.objective[var] = self.objective.get(var, 0.0) + float(coef)

    def count(self, kind: str | None = None, family: str | None = None) -> int:
        """Variables of ``kind`` whose name starts with ``family`` followed by ``_``."""
        return sum(
            1 for v in self.variables.values()
            if (kind is None or v.kind == kind) and (family is None or v.name.split("_")[0] == family)
        )

    def evaluate(self, values: Mapping[str, float]) -> float:
        missing = [n for n in self.objective if n not in values]
        if missing:
            raise MissingVariableError(f"no value for variable {missing[0]}")
        return self.objective_constant + math.fsum(c * values[n] for n, c in self.objective.items())

    def check(self, values: Mapping[str, float], tol: float = 1e-6) -> None:
        """Raise if ``values`` is incomplete, fractional where it must not be, or infeasible."""
        missing = sorted(set(self.variables) - set(values))
        if missing:
            raise MissingVariableError(
                f"no value for {len(missing)} variable(s), first {missing[0]}")
        for v in self.variables.values():
            x = values[v.name]
            if v.kind != "continuous" and abs(x - round(x)) > tol:
                raise IntegralityError(f"variable {v.name} = {x!r} is not integral")
        bad = []
        for v in self.variables.values():
            x = values[v.name]
            if x < v.lb - tol:
                bad.append((f"bound:{v.name}", v.lb - x))
            elif x > v.ub + tol:
                bad.append((f"bound:{v.name}", x - v.ub))
        for c in self.constraints.values():
            gap = c.violation(values)
            if gap > tol:
                bad.append((c.name, gap))
        if bad:
            raise ConstraintViolationError(bad)
