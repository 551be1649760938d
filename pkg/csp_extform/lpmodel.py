"""Exact-rational LP model: variables, constraints with provenance, objective."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from csp_extform.instance import Sense

PROVENANCES = ("(1)", "(2)", "(4)", "(5)", "(6)", "")


class Relation(str, Enum):
    EQ = "="
    LE = "<="
    GE = ">="


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "y" | "g" | "f" | "x" (hand-built models)
    key: Hashable = None
    lower: Fraction = Fraction(0)
    upper: Fraction | None = Fraction(1)


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: tuple[tuple[str, Fraction], ...]
    relation: Relation = Relation.EQ
    rhs: Fraction = Fraction(0)
    provenance: str = ""

    def activity(self, values: Mapping[str, Fraction]) -> Fraction:
        return sum((a * values.get(name, Fraction(0)) for name, a in self.coeffs), Fraction(0))

    def holds(self, values: Mapping[str, Fraction]) -> bool:
        lhs = self.activity(values)
        if self.relation is Relation.EQ:
            return lhs == self.rhs
        if self.relation is Relation.LE:
            return lhs <= self.rhs
        return lhs >= self.rhs


@dataclass
class LpModel:
    name: str
    sense: Sense = Sense.MAX
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[str, Fraction] = field(default_factory=dict)
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def add_variable(
        self,
        name: str,
        kind: str,
        key: Hashable = None,
        lower: Fraction | int = 0,
        upper: Fraction | int | None = 1,
    ) -> Variable:
        """Add a variable, or return the existing one with that name."""
        if name in self._index:
            return self.variables[self._index[name]]
        var = Variable(
            name, kind, key, Fraction(lower), None if upper is None else Fraction(upper)
        )
        self._index[name] = len(self.variables)
        self.variables.append(var)
        return var

    def has_variable(self, name: str) -> bool:
        return name in self._index

    def variable(self, name: str) -> Variable:
        return self.variables[self._index[name]]

    def position(self, name: str) -> int:
        return self._index[name]

    def add_constraint(
        self,
        name: str,
        coeffs: Mapping[str, Fraction | int] | Iterable[tuple[str, Fraction | int]],
        relation: Relation = Relation.EQ,
        rhs: Fraction | int = 0,
        provenance: str = "",
    ) -> Constraint:
        """Append a constraint; coefficients on the same variable are summed, zeros dropped."""
        if provenance not in PROVENANCES:
            raise ValueError(f"Constraint {name} has unknown provenance {provenance!r}")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: dict[str, Fraction] = {}
        for var_name, a in items:
            if not self.has_variable(var_name):
                raise KeyError(f"Constraint {name} references unknown variable {var_name}")
            merged[var_name] = merged.get(var_name, Fraction(0)) + Fraction(a)
        row = tuple((v, a) for v, a in merged.items() if a != 0)
        constraint = Constraint(name, row, relation, Fraction(rhs), provenance)
        self.constraints.append(constraint)
        return constraint

    def add_objective(self, name: str, coefficient: Fraction | int) -> None:
        if not self.has_variable(name):
            raise KeyError(f"Objective references unknown variable {name}")
        total = self.objective.get(name, Fraction(0)) + Fraction(coefficient)
        if total:
            self.objective[name] = total
        else:
            self.objective.pop(name, None)

    def variables_of_kind(self, kind: str) -> list[Variable]:
        return [v for v in self.variables if v.kind == kind]

    @property
    def nonzeros(self) -> int:
        return sum(len(c.coeffs) for c in self.constraints)

    def objective_value(self, values: Mapping[str, Fraction]) -> Fraction:
        return sum((a * values.get(n, Fraction(0)) for n, a in self.objective.items()), Fraction(0))


def check_point(model: LpModel, values: Mapping[str, Fraction]) -> list[str]:
    """Names of the constraints and bounds that ``values`` violates (exact, zero tolerance)."""
    violated = [c.name for c in model.constraints if not c.holds(values)]
    for var in model.variables:
        x = values.get(var.name, Fraction(0))
        if x < var.lower or (var.upper is not None and x > var.upper):
            violated.append(f"bound:{var.name}")
    return violated
