"""validate -> decompose -> make nice -> generate -> solve -> project."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from csp_extform.config import Settings
from csp_extform.errors import DecompositionError
from csp_extform.extform import (
    BaseModel,
    ExtendedModel,
    FractionalPoint,
    build_base_lp,
    build_extended_lp,
    f_name,
    point_from_values,
)
from csp_extform.instance import CspInstance, ExtendedAssignment, constraint_graph
from csp_extform.projections import YgPoint, proj1, proj2, yg_from_base_values
from csp_extform.ratlp import LpSolution, SolveStatus, is_integral, solve
from csp_extform.treedec import (
    NiceTreeDecomposition,
    TreeDecomposition,
    heuristic_tree_decomposition,
    make_nice,
    validate_td,
)

log = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    instance: CspInstance
    td: TreeDecomposition
    ntd: NiceTreeDecomposition
    model: ExtendedModel | BaseModel
    solution: LpSolution
    point: FractionalPoint | None = None
    yg: YgPoint | None = None
    witness: ExtendedAssignment | None = None
    integral: bool | None = None

    @property
    def status(self) -> SolveStatus:
        return self.solution.status

    @property
    def optimum(self) -> Fraction | None:
        return self.solution.objective


def decompose(
    instance: CspInstance, td: TreeDecomposition | None = None
) -> tuple[TreeDecomposition, NiceTreeDecomposition]:
    """Check a supplied TD (or build the min-fill one) and normalize it.

    Raises:
        DecompositionError: the supplied TD fails a decomposition invariant.
    """
    g = constraint_graph(instance)
    if td is None:
        td = heuristic_tree_decomposition(g)
    else:
        issues = validate_td(g, td)
        if issues:
            raise DecompositionError(issues)
    return td, make_nice(td)


def solve_instance(
    instance: CspInstance,
    td: TreeDecomposition | None = None,
    settings: Settings | None = None,
    base: bool = False,
    dump_tableau: bool = False,
) -> PipelineResult:
    """Solve an ingested instance through P(Q), or through the base relaxation when ``base``."""
    settings = settings or Settings()
    td, ntd = decompose(instance, td)

    model: ExtendedModel | BaseModel
    if base:
        model = build_base_lp(instance)
    else:
        model = build_extended_lp(instance, ntd, settings.max_configs)
    solution = solve(model.lp, settings, dump_tableau=dump_tableau)
    result = PipelineResult(instance, td, ntd, model, solution)
    if not solution.optimal:
        log.debug("pipeline stopped: %s", solution.status.value)
        return result

    if isinstance(model, ExtendedModel):
        result.point = point_from_values(model, solution.values)
        result.integral = is_integral(solution, (f_name(k) for k in model.f_configurations()))
        result.yg = proj2(model, result.point)
    else:
        result.yg = yg_from_base_values(model, solution.values)
        result.integral = result.yg.is_integral()
    if result.integral:
        result.witness = proj1(instance, result.yg)
    return result
