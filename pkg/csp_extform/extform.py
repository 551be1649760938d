"""LP generators: the base relaxation over (y, g) and the extended formulation P(Q) over f."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from csp_extform.configurations import Configuration, enumerate_configurations
from csp_extform.errors import ConfigLimitExceeded, InfeasibleAssignment, ScopeNotCovered
from csp_extform.instance import Assignment, CspInstance, is_feasible
from csp_extform.lpmodel import LpModel, Relation
from csp_extform.treedec import NiceTreeDecomposition, NodeKind

log = logging.getLogger(__name__)

FractionalPoint = dict[Configuration, Fraction]
"""Values of the f-variables, keyed by configuration; missing entries are 0."""


# ---------------------------------------------------------------------------
# Names
# ---------------------------------------------------------------------------

def y_name(v: int, i: int) -> str:
    return f"y_{v}_{i}"


def g_name(cid: str, k: Configuration) -> str:
    return f"g_{cid}_{k.label()}"


def f_name(k: Configuration) -> str:
    return f"f_{k.label()}"


def bag_label(bag: frozenset[int]) -> str:
    return "_".join(str(v) for v in sorted(bag)) or "empty"


def constraint_ids(instance: CspInstance) -> dict[str, tuple[int, ...]]:
    """``h<j>`` for the j-th hard constraint, ``s<id>`` for soft ones, mapped to scopes."""
    ids = {f"h{j}": c.scope for j, c in enumerate(instance.hard)}
    ids.update({f"s{c.id}": c.scope for c in instance.soft})
    return ids


# ---------------------------------------------------------------------------
# Base relaxation
# ---------------------------------------------------------------------------

@dataclass
class BaseModel:
    lp: LpModel
    instance: CspInstance
    configs: dict[str, list[Configuration]] = field(default_factory=dict)


def build_base_lp(instance: CspInstance) -> BaseModel:
    """y per (v, i), g per (constraint, K in K(U)), rows (1) and (2), bounds (3)."""
    lp = LpModel("base", instance.sense)
    for v in instance.variables:
        for i in instance.domain(v):
            lp.add_variable(y_name(v, i), "y", (v, i))
    for v in instance.variables:
        lp.add_constraint(
            f"c1_{v}", {y_name(v, i): 1 for i in instance.domain(v)},
            Relation.EQ, 1, "(1)",
        )

    model = BaseModel(lp, instance)
    soft_by_cid = {f"s{c.id}": c for c in instance.soft}
    for cid, scope in constraint_ids(instance).items():
        configs = enumerate_configurations(instance, scope)
        model.configs[cid] = configs
        for k in configs:
            lp.add_variable(g_name(cid, k), "g", (cid, k))
        for v in scope:
            for i in instance.domain(v):
                row: dict[str, Fraction | int] = {g_name(cid, k): 1 for k in configs if k[v] == i}
                row[y_name(v, i)] = -1
                lp.add_constraint(f"c2_{cid}_{v}_{i}", row, Relation.EQ, 0, "(2)")
        soft = soft_by_cid.get(cid)
        if soft is not None:
            for k in configs:
                lp.add_objective(g_name(cid, k), soft.weight * instance.score(soft, k.values_on(scope)))

    log.debug("base LP: %d variables, %d constraints", len(lp.variables), len(lp.constraints))
    return model


# ---------------------------------------------------------------------------
# Extended formulation
# ---------------------------------------------------------------------------

@dataclass
class ExtendedModel:
    """P(Q) plus what the projections need to read it back."""

    lp: LpModel
    instance: CspInstance
    ntd: NiceTreeDecomposition
    configs: dict[frozenset[int], list[Configuration]] = field(default_factory=dict)
    vertex_bag: dict[int, frozenset[int]] = field(default_factory=dict)
    scope_bag: dict[str, frozenset[int]] = field(default_factory=dict)
    scopes: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def f_configurations(self) -> list[Configuration]:
        return [k for bag in self.configs for k in self.configs[bag]]


def _group_by_restriction(
    configs: list[Configuration], onto: frozenset[int]
) -> dict[Configuration, list[Configuration]]:
    groups: dict[Configuration, list[Configuration]] = defaultdict(list)
    for k in configs:
        groups[k.restrict(onto)].append(k)
    return groups


def build_extended_lp(
    instance: CspInstance,
    ntd: NiceTreeDecomposition,
    max_configs: int | None = None,
) -> ExtendedModel:
    """Generate P(Q) for a nice decomposition of the constraint graph.

    f-variables are keyed by configuration, so nodes with equal bags share
    them and join nodes need no rows of their own.

    Raises:
        ScopeNotCovered: a vertex or constraint scope lies in no bag.
        ConfigLimitExceeded: more than ``max_configs`` f-variables.
    """
    lp = LpModel("extended", instance.sense)
    model = ExtendedModel(lp, instance, ntd, scopes=constraint_ids(instance))
    bags = ntd.distinct_bags()

    for bag in bags:
        configs = enumerate_configurations(instance, bag)
        model.configs[bag] = configs
        for k in configs:
            lp.add_variable(f_name(k), "f", k)
        if max_configs is not None and len(lp.variables) > max_configs:
            raise ConfigLimitExceeded(
                f"Extended formulation needs more than {max_configs} f-variables "
                f"(width {ntd.width()}); raise --max-configs or supply a narrower TD"
            )
        lp.add_constraint(
            f"c4_{bag_label(bag)}", {f_name(k): 1 for k in configs}, Relation.EQ, 1, "(4)"
        )

    for node in ntd.preorder():
        if node.kind not in (NodeKind.INTRODUCE, NodeKind.FORGET):
            continue
        child_bag = ntd.nodes[node.children[0]].bag
        if node.kind is NodeKind.INTRODUCE:
            big, small, tag = node.bag, child_bag, "(5)"
        else:
            big, small, tag = child_bag, node.bag, "(6)"
        groups = _group_by_restriction(model.configs[big], small)
        for k in model.configs[small]:
            row: dict[str, Fraction | int] = {f_name(k2): 1 for k2 in groups.get(k, [])}
            row[f_name(k)] = -1
            lp.add_constraint(f"c{tag[1]}_{node.id}_{k.label()}", row, Relation.EQ, 0, tag)

    for v in instance.variables:
        bag = next((b for b in bags if v in b), None)
        if bag is None:
            raise ScopeNotCovered(f"Variable {v} appears in no bag")
        model.vertex_bag[v] = bag
    for cid, scope in model.scopes.items():
        bag = next((b for b in bags if set(scope) <= b), None)
        if bag is None:
            raise ScopeNotCovered(f"Scope {list(scope)} of constraint {cid} is contained in no bag")
        model.scope_bag[cid] = bag

    for c in instance.soft:
        scope = c.scope
        for k in model.configs[model.scope_bag[f"s{c.id}"]]:
            lp.add_objective(f_name(k), c.weight * instance.score(c, k.values_on(scope)))

    log.debug(
        "extended LP: %d f-variables over %d bags, %d constraints",
        len(lp.variables), len(bags), len(lp.constraints),
    )
    return model


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------

def point_from_values(model: ExtendedModel, values: Mapping[str, Fraction]) -> FractionalPoint:
    """Read the f-part of an LP solution as a configuration-keyed point."""
    return {
        k: values.get(f_name(k), Fraction(0))
        for k in model.f_configurations()
    }


def values_from_point(point: Mapping[Configuration, Fraction]) -> dict[str, Fraction]:
    return {f_name(k): Fraction(x) for k, x in point.items()}


def encode_assignment(model: ExtendedModel, z: Assignment) -> FractionalPoint:
    """The integral point of P(Q) describing a feasible assignment."""
    if not is_feasible(model.instance, z):
        raise InfeasibleAssignment(f"Assignment {list(z)} violates a hard constraint")
    full = Configuration(tuple((v, z[v - 1]) for v in model.instance.variables))
    return {
        k: Fraction(int(full.restrict(k.support) == k))
        for k in model.f_configurations()
    }


# ---------------------------------------------------------------------------
# Size accounting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FormulationStats:
    variables: int
    constraints: int
    nonzeros: int
    by_provenance: dict[str, int]
    nodes: int | None = None
    width: int | None = None
    max_domain: int | None = None
    variable_bound: int | None = None
    constraint_bound: int | None = None

    @property
    def within_bounds(self) -> bool | None:
        if self.variable_bound is None or self.constraint_bound is None:
            return None
        return self.variables <= self.variable_bound and self.constraints <= self.constraint_bound

    def as_row(self) -> dict[str, object]:
        row: dict[str, object] = {
            "variables": self.variables,
            "constraints": self.constraints,
            "nonzeros": self.nonzeros,
        }
        row.update({f"rows{p}": n for p, n in sorted(self.by_provenance.items())})
        if self.nodes is not None:
            row.update(
                nodes=self.nodes,
                width=self.width,
                D=self.max_domain,
                variable_bound=self.variable_bound,
                constraint_bound=self.constraint_bound,
                within_bounds=self.within_bounds,
            )
        return row


def formulation_stats(model: ExtendedModel | BaseModel) -> FormulationStats:
    """Exact counts, plus the size-bound check for the extended formulation."""
    lp = model.lp
    by_provenance: dict[str, int] = defaultdict(int)
    for c in lp.constraints:
        by_provenance[c.provenance] += 1
    counts = dict(
        variables=len(lp.variables),
        constraints=len(lp.constraints),
        nonzeros=lp.nonzeros,
        by_provenance=dict(by_provenance),
    )
    if not isinstance(model, ExtendedModel):
        return FormulationStats(**counts)
    nodes = len(model.ntd)
    tau = model.ntd.width()
    d = model.instance.max_domain_size
    per_node = d ** (tau + 1) if tau >= 0 else 1
    return FormulationStats(
        **counts,
        nodes=nodes,
        width=tau,
        max_domain=d,
        variable_bound=nodes * per_node,
        constraint_bound=nodes * (per_node + 1),
    )
