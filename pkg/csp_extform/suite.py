"""Seeded random instances and the cross-checks run over them."""

from __future__ import annotations

import itertools
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable

from csp_extform.config import Settings
from csp_extform.decompose import decompose_lemma1
from csp_extform.extform import ExtendedModel, build_extended_lp, encode_assignment, formulation_stats, values_from_point
from csp_extform.instance import CspInstance, HardConstraint, Sense, SoftConstraint, ingest, is_feasible
from csp_extform.lpmodel import check_point
from csp_extform.oracles import brute_force, treewidth_dp
from csp_extform.pipeline import decompose, solve_instance
from csp_extform.ratlp import check_optimality
from csp_extform.rational import format_rational
from csp_extform.reductions import GraphInput, reduce_independent_set
from csp_extform.treedec import make_nice

log = logging.getLogger(__name__)


def _random_scope(rng: random.Random, n: int, arity: int) -> tuple[int, ...]:
    return tuple(sorted(rng.sample(range(1, n + 1), min(arity, n))))


def random_instance(seed: int, settings: Settings | None = None) -> CspInstance:
    """Small instance with binary and ternary constraints and weights of denominator <= 7."""
    settings = settings or Settings()
    rng = random.Random(seed)
    n = rng.randint(1, settings.suite_max_vars)
    domains = tuple(tuple(range(rng.randint(1, settings.suite_max_domain))) for _ in range(n))

    hard = []
    for _ in range(rng.randint(0, n // 2 + 1)):
        scope = _random_scope(rng, n, rng.choice((2, 3)))
        tuples = list(itertools.product(*(domains[v - 1] for v in scope)))
        hard.append(HardConstraint(scope, frozenset(t for t in tuples if rng.random() < 0.75)))

    soft = []
    for cid in range(rng.randint(0, n // 2 + 2)):
        scope = _random_scope(rng, n, rng.choice((1, 2, 3)))
        tuples = list(itertools.product(*(domains[v - 1] for v in scope)))
        weight = Fraction(rng.randint(0, 9), rng.randint(1, 7))
        if rng.random() < 0.75:
            allowed = [t for t in tuples if rng.random() < 0.5]
            soft.append(SoftConstraint.from_relation(cid, scope, allowed, weight))
        else:
            payoff = {t: Fraction(rng.randint(0, 6), rng.randint(1, 7)) for t in tuples if rng.random() < 0.7}
            soft.append(SoftConstraint(cid, scope, payoff, weight, relation=False))

    sense = rng.choice((Sense.MAX, Sense.MIN))
    return ingest(CspInstance(n, domains, tuple(hard), tuple(soft), sense))


@dataclass(frozen=True)
class CaseReport:
    label: str
    n: int
    max_domain: int
    width: int
    sense: str
    brute: str
    dp: str
    dp_alt: str
    lp: str
    base: str
    integral: bool | None
    within_bounds: bool | None
    certified: bool | None
    ordered: bool

    @property
    def agree(self) -> bool:
        return self.brute == self.dp == self.dp_alt == self.lp

    @property
    def ok(self) -> bool:
        return self.agree and self.integral is not False and bool(self.within_bounds) \
            and self.certified is not False and self.ordered

    def as_row(self) -> dict[str, object]:
        row = asdict(self)
        row.update(agree=self.agree, ok=self.ok)
        return row


def _outcome(feasible: bool, optimum: Fraction | None) -> str:
    return format_rational(optimum) if feasible and optimum is not None else "Infeasible"


def _relaxation_ordered(instance: CspInstance, base: Fraction | None, extended: Fraction | None) -> bool:
    if base is None or extended is None:
        return True
    return base >= extended if instance.sense is Sense.MAX else base <= extended


def check_instance(
    instance: CspInstance,
    label: str,
    settings: Settings | None = None,
    inject_fault: bool = False,
) -> CaseReport:
    """Brute force vs the DP on two nice decompositions vs the exact LP optimum.

    With ``inject_fault`` the base relaxation stands in for P(Q), which must
    make the integrality check fail on instances with a gap.
    """
    settings = settings or Settings()
    brute = brute_force(instance, settings.brute_force_cap)
    td, ntd = decompose(instance)
    alt = make_nice(td, root=max(td.tree.nodes))
    dp = treewidth_dp(instance, ntd)
    dp_alt = treewidth_dp(instance, alt)

    extended = solve_instance(instance, td, settings)
    base = solve_instance(instance, td, settings, base=True)
    tested = base if inject_fault else extended
    stats = formulation_stats(extended.model)
    certified = None
    if tested.solution.optimal:
        certified = not check_optimality(tested.solution)

    report = CaseReport(
        label=label,
        n=instance.n,
        max_domain=instance.max_domain_size,
        width=ntd.width(),
        sense=instance.sense.value,
        brute=_outcome(brute.feasible, brute.optimum),
        dp=_outcome(dp.feasible, dp.optimum),
        dp_alt=_outcome(dp_alt.feasible, dp_alt.optimum),
        lp=_outcome(tested.solution.optimal, tested.optimum),
        base=_outcome(base.solution.optimal, base.optimum),
        integral=tested.integral,
        within_bounds=stats.within_bounds,
        certified=certified,
        ordered=_relaxation_ordered(instance, base.optimum, extended.optimum),
    )
    if not report.ok:
        log.debug("case %s failed: %s", label, report)
    return report


def check_seed(seed: int, settings: Settings | None = None, inject_fault: bool = False) -> CaseReport:
    return check_instance(random_instance(seed, settings), f"seed {seed}", settings, inject_fault)


def run_suite(
    seeds: Iterable[int],
    settings: Settings | None = None,
    jobs: int = 1,
    inject_fault: bool = False,
) -> list[CaseReport]:
    """Check every seed; results come back in seed order whatever ``jobs`` is."""
    seeds = list(seeds)
    settings = settings or Settings()
    if jobs <= 1 or len(seeds) <= 1:
        return [check_seed(s, settings, inject_fault) for s in seeds]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(
            check_seed, seeds, itertools.repeat(settings), itertools.repeat(inject_fault)
        ))


# ---------------------------------------------------------------------------
# Decomposition of fractional points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointReport:
    seed: int
    m: int
    points: int
    exact: bool
    all_feasible: bool

    @property
    def ok(self) -> bool:
        return self.exact and self.all_feasible


def random_feasible_point(model: ExtendedModel, rng: random.Random, max_points: int = 4):
    """A random rational convex combination of up to ``max_points`` integral points."""
    instance = model.instance
    feasible = [z for z in itertools.product(*instance.domains) if is_feasible(instance, z)]
    chosen = rng.sample(feasible, min(len(feasible), rng.randint(1, max_points)))
    weights = [rng.randint(1, 6) for _ in chosen]
    total = sum(weights)
    point: dict = {}
    for z, w in zip(chosen, weights):
        for k, x in encode_assignment(model, z).items():
            point[k] = point.get(k, Fraction(0)) + Fraction(w, total) * x
    return point


def check_point_decomposition(seed: int, settings: Settings | None = None) -> PointReport:
    """Draw a feasible instance, a rational point of its P(Q), and decompose it."""
    settings = settings or Settings()
    attempt = 0
    while True:
        instance = random_instance(seed * 1000 + attempt, settings)
        if brute_force(instance, settings.brute_force_cap).feasible:
            break
        attempt += 1
    _, ntd = decompose(instance)
    model = build_extended_lp(instance, ntd, settings.max_configs)
    point = random_feasible_point(model, random.Random(seed))
    result = decompose_lemma1(model, point)
    average = result.average()
    exact = all(average.get(k, Fraction(0)) == x for k, x in point.items())
    all_feasible = all(not check_point(model.lp, values_from_point(p)) for p, _ in result.points)
    return PointReport(seed, result.m, len(result.points), exact, all_feasible)


# ---------------------------------------------------------------------------
# Size scaling
# ---------------------------------------------------------------------------

def path_graph(n: int) -> GraphInput:
    return GraphInput(n, tuple((v, v + 1) for v in range(1, n)))


def size_scaling(ns: Iterable[int] = (5, 10, 20, 40)) -> list[dict[str, int]]:
    """Formulation sizes of Independent Set on paths of the given lengths."""
    rows = []
    for n in ns:
        instance = reduce_independent_set(path_graph(n)).instance
        _, ntd = decompose(instance)
        stats = formulation_stats(build_extended_lp(instance, ntd))
        rows.append({"n": n, "width": ntd.width(), "variables": stats.variables, "constraints": stats.constraints})
    return rows
