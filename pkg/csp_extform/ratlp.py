"""Exact two-phase simplex over Fractions with Bland's rule.

Rows are kept sparse (column -> coefficient dicts). Variables are shifted to a
zero lower bound, finite upper bounds become ``<=`` rows unless a
non-negative equality row already implies them, and every row gets a slack
or an artificial so the first basis is the identity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

from csp_extform.config import Settings
from csp_extform.errors import SolverError
from csp_extform.instance import Sense
from csp_extform.lpmodel import LpModel, Relation
from csp_extform.rational import format_rational

log = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

Row = dict[int, Fraction]


class SolveStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class StandardForm:
    """min cost.x' s.t. rows x' = rhs, x' >= 0, with x = x' + shift on the model columns."""

    columns: tuple[str, ...]
    rows: tuple[Row, ...]
    rhs: tuple[Fraction, ...]
    cost: Row
    shift: tuple[Fraction, ...]

    @property
    def originals(self) -> int:
        return len(self.shift)


@dataclass
class LpSolution:
    status: SolveStatus
    values: dict[str, Fraction] = field(default_factory=dict)
    objective: Fraction | None = None
    basis: tuple[str, ...] = ()
    pivots: int = 0
    standard_form: StandardForm | None = None
    basis_columns: tuple[int, ...] = ()
    tableau: str | None = None

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


def _axpy(target: Row, factor: Fraction, source: Row) -> None:
    """target += factor * source, dropping entries that cancel."""
    for j, x in source.items():
        value = target.get(j, ZERO) + factor * x
        if value:
            target[j] = value
        else:
            target.pop(j, None)


_FLIP = {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}


class _Simplex:
    def __init__(self, model: LpModel, max_pivots: int) -> None:
        self.model = model
        self.max_pivots = max_pivots
        self.pivots = 0
        self.columns: list[str] = [v.name for v in model.variables]
        shift = [v.lower for v in model.variables]
        self.shift = tuple(shift)

        pending: list[tuple[Row, Relation, Fraction, str]] = []
        for c in model.constraints:
            coeffs = {model.position(name): a for name, a in c.coeffs}
            b = c.rhs - sum((a * shift[j] for j, a in coeffs.items()), ZERO)
            pending.append((coeffs, c.relation, b, c.name))

        implied = self._implied_upper_bounds(pending)
        for j, var in enumerate(model.variables):
            if var.upper is None:
                continue
            bound = var.upper - var.lower
            if j in implied and implied[j] <= bound:
                continue
            pending.append(({j: ONE}, Relation.LE, bound, f"ub:{var.name}"))

        self.rows: list[Row] = []
        self.rhs: list[Fraction] = []
        self.basis: list[int] = []
        self.row_names: list[str] = []
        needs_artificial: list[int] = []
        for coeffs, relation, b, name in pending:
            if b < 0:
                coeffs = {j: -a for j, a in coeffs.items()}
                b, relation = -b, _FLIP[relation]
            row = dict(coeffs)
            r = len(self.rows)
            if relation is Relation.LE:
                row[self._new_column(f"slack:{name}")] = ONE
                self.basis.append(len(self.columns) - 1)
            else:
                if relation is Relation.GE:
                    row[self._new_column(f"surplus:{name}")] = -ONE
                self.basis.append(-1)
                needs_artificial.append(r)
            self.rows.append(row)
            self.rhs.append(b)
            self.row_names.append(name)

        self.n_real = len(self.columns)
        for r in needs_artificial:
            col = self._new_column(f"art:{self.row_names[r]}")
            self.rows[r][col] = ONE
            self.basis[r] = col
        self.original_rows = [dict(row) for row in self.rows]
        self.original_rhs = list(self.rhs)

        self.cost: Row = {}
        self.z = ZERO

    @staticmethod
    def _implied_upper_bounds(pending: list[tuple[Row, Relation, Fraction, str]]) -> dict[int, Fraction]:
        implied: dict[int, Fraction] = {}
        for coeffs, relation, b, _ in pending:
            if relation is not Relation.EQ or not coeffs:
                continue
            if b < 0:
                coeffs, b = {j: -a for j, a in coeffs.items()}, -b
            if any(a < 0 for a in coeffs.values()):
                continue
            for j, a in coeffs.items():
                bound = b / a
                if j not in implied or bound < implied[j]:
                    implied[j] = bound
        return implied

    def _new_column(self, name: str) -> int:
        self.columns.append(name)
        return len(self.columns) - 1

    # -- pivoting ----------------------------------------------------------

    def _pivot(self, r: int, e: int) -> None:
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise SolverError(f"Pivot ceiling of {self.max_pivots} reached")
        a = self.rows[r][e]
        prow = self.rows[r] if a == ONE else {j: x / a for j, x in self.rows[r].items()}
        self.rows[r] = prow
        self.rhs[r] /= a
        for i, row in enumerate(self.rows):
            if i != r and e in row:
                factor = row[e]
                _axpy(row, -factor, prow)
                self.rhs[i] -= factor * self.rhs[r]
        if e in self.cost:
            factor = self.cost[e]
            _axpy(self.cost, -factor, prow)
            self.z += factor * self.rhs[r]
        self.basis[r] = e

    def _price(self, cost: Mapping[int, Fraction]) -> None:
        """Load a cost vector and express it in terms of the nonbasic columns."""
        self.cost = {j: c for j, c in cost.items() if c}
        self.z = ZERO
        for r, b in enumerate(self.basis):
            c_b = self.cost.get(b)
            if c_b:
                _axpy(self.cost, -c_b, self.rows[r])
                self.z += c_b * self.rhs[r]

    def _optimize(self, allowed: int) -> bool:
        """Bland's rule until optimal (True) or unbounded (False)."""
        while True:
            entering = min((j for j, d in self.cost.items() if d < 0 and j < allowed), default=None)
            if entering is None:
                return True
            leaving: int | None = None
            best = ZERO
            for r, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                ratio = self.rhs[r] / a
                if leaving is None or ratio < best or (ratio == best and self.basis[r] < self.basis[leaving]):
                    leaving, best = r, ratio
            if leaving is None:
                return False
            self._pivot(leaving, entering)

    # -- phases ------------------------------------------------------------

    def phase_one(self) -> bool:
        """Drive the artificials to zero; False when the model is infeasible."""
        artificials = range(self.n_real, len(self.columns))
        if not artificials:
            return True
        self._price({j: ONE for j in artificials})
        self._optimize(len(self.columns))
        if self.z > 0:
            return False

        redundant: list[int] = []
        for r, b in enumerate(self.basis):
            if b < self.n_real:
                continue
            candidates = [j for j in self.rows[r] if j < self.n_real]
            if candidates:
                self._pivot(r, min(candidates))
            else:
                redundant.append(r)
        for r in reversed(redundant):
            for store in (self.rows, self.rhs, self.basis, self.row_names, self.original_rows, self.original_rhs):
                del store[r]
        for row in self.rows:
            for j in [j for j in row if j >= self.n_real]:
                del row[j]
        del self.columns[self.n_real:]
        log.debug("phase 1 done after %d pivots, %d redundant rows dropped", self.pivots, len(redundant))
        return True

    def min_costs(self) -> Row:
        sign = -1 if self.model.sense is Sense.MAX else 1
        return {self.model.position(name): sign * c for name, c in self.model.objective.items()}

    def phase_two(self) -> bool:
        self._price(self.min_costs())
        return self._optimize(self.n_real)

    # -- results -----------------------------------------------------------

    def primal(self) -> list[Fraction]:
        x = [ZERO] * self.n_real
        for r, b in enumerate(self.basis):
            x[b] = self.rhs[r]
        return x

    def standard_form(self) -> StandardForm:
        rows = tuple({j: a for j, a in row.items() if j < self.n_real} for row in self.original_rows)
        return StandardForm(
            columns=tuple(self.columns[: self.n_real]),
            rows=rows,
            rhs=tuple(self.original_rhs),
            cost=self.min_costs(),
            shift=self.shift,
        )

    def dump(self) -> str:
        lines = [f"objective row (min form, z = {format_rational(self.z)}):"]
        lines.append("  " + " ".join(
            f"{format_rational(d)}*{self.columns[j]}" for j, d in sorted(self.cost.items())
        ))
        for r, row in enumerate(self.rows):
            terms = " ".join(f"{format_rational(a)}*{self.columns[j]}" for j, a in sorted(row.items()))
            lines.append(f"{self.columns[self.basis[r]]} = {format_rational(self.rhs[r])} | {terms}")
        return "\n".join(lines) + "\n"


def solve(model: LpModel, settings: Settings | None = None, dump_tableau: bool = False) -> LpSolution:
    """Solve ``model`` exactly; Optimal solutions are vertices of its polytope.

    Raises:
        SolverError: the pivot ceiling was reached.
    """
    settings = settings or Settings()
    simplex = _Simplex(model, settings.max_pivots)
    if not simplex.phase_one():
        log.debug("infeasible after %d pivots", simplex.pivots)
        return LpSolution(SolveStatus.INFEASIBLE, pivots=simplex.pivots)
    if not simplex.phase_two():
        return LpSolution(SolveStatus.UNBOUNDED, pivots=simplex.pivots)

    shifted = simplex.primal()
    values = {
        var.name: shifted[j] + var.lower for j, var in enumerate(model.variables)
    }
    solution = LpSolution(
        SolveStatus.OPTIMAL,
        values=values,
        objective=model.objective_value(values),
        basis=tuple(simplex.columns[b] for b in simplex.basis),
        pivots=simplex.pivots,
        standard_form=simplex.standard_form(),
        basis_columns=tuple(simplex.basis),
        tableau=simplex.dump() if dump_tableau else None,
    )
    log.debug("optimal after %d pivots: %s", simplex.pivots, format_rational(solution.objective))
    return solution


# ---------------------------------------------------------------------------
# Independent certificate
# ---------------------------------------------------------------------------

def _solve_square(equations: list[Row], rhs: list[Fraction]) -> dict[int, Fraction]:
    """Gauss-Jordan on a sparse square system; raises SolverError when singular."""
    rows = [dict(eq) for eq in equations]
    values = list(rhs)
    pivot_row: dict[int, int] = {}
    for r, row in enumerate(rows):
        for k in [k for k in row if k in pivot_row]:
            if k not in row:
                continue
            factor = row[k]
            p = pivot_row[k]
            _axpy(row, -factor, rows[p])
            values[r] -= factor * values[p]
        if not row:
            raise SolverError("Basis matrix is singular")
        k = min(row)
        a = row[k]
        rows[r] = row = {j: x / a for j, x in row.items()}
        values[r] /= a
        for p in pivot_row.values():
            if k in rows[p]:
                factor = rows[p][k]
                _axpy(rows[p], -factor, row)
                values[p] -= factor * values[r]
        pivot_row[k] = r
    return {k: values[r] for k, r in pivot_row.items()}


def check_optimality(solution: LpSolution) -> list[str]:
    """Re-derive x_B and the duals from scratch and check the optimality conditions.

    Returns the problems found; an empty list certifies the solution.
    """
    sf = solution.standard_form
    if not solution.optimal or sf is None:
        return [f"No basis to certify (status {solution.status.value})"]
    basis = list(solution.basis_columns)
    in_basis = set(basis)
    problems: list[str] = []

    primal_eqs = [{j: a for j, a in row.items() if j in in_basis} for row in sf.rows]
    try:
        x_b = _solve_square(primal_eqs, list(sf.rhs))
    except SolverError as exc:
        return [str(exc)]
    for j, x in sorted(x_b.items()):
        if x < 0:
            problems.append(f"{sf.columns[j]} = {format_rational(x)} is negative")

    columns: dict[int, Row] = {}
    for i, row in enumerate(sf.rows):
        for j, a in row.items():
            columns.setdefault(j, {})[i] = a
    dual_eqs = [columns.get(j, {}) for j in basis]
    try:
        pi = _solve_square(dual_eqs, [sf.cost.get(j, ZERO) for j in basis])
    except SolverError as exc:
        return problems + [str(exc)]
    for j, name in enumerate(sf.columns):
        if j in in_basis:
            continue
        reduced = sf.cost.get(j, ZERO) - sum(
            (a * pi.get(i, ZERO) for i, a in columns.get(j, {}).items()), ZERO
        )
        if reduced < 0:
            problems.append(f"reduced cost of {name} is {format_rational(reduced)}")

    for j in range(sf.originals):
        x = x_b.get(j, ZERO) + sf.shift[j]
        name = sf.columns[j]
        if solution.values.get(name) != x:
            problems.append(f"{name} differs from the basic solution")
    return problems


def is_integral(solution: LpSolution, names: Iterable[str]) -> bool:
    """True iff every listed value is exactly 0 or 1."""
    return all(solution.values.get(name, ZERO) in (ZERO, ONE) for name in names)
