"""Decompose a rational point of P(Q) into an average of integral points.

Every point is scaled by M, the lcm of its denominators, and read as M copies
of a selection: one configuration per bag. The copies are assembled bottom-up
over the nice decomposition. Leaves hand out M f(K) copies per K, introduce
nodes split each copy group over the extensions K[v <- j], forget nodes add
the restriction, and join nodes pair the groups of their children that agree
on the shared bag. Copies are kept run-length encoded as (selection, count).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from csp_extform.configurations import Configuration
from csp_extform.errors import InfeasibleInput
from csp_extform.extform import ExtendedModel, FractionalPoint, values_from_point
from csp_extform.lpmodel import check_point
from csp_extform.rational import lcm_of_denominators
from csp_extform.treedec import NiceNode, NodeKind

log = logging.getLogger(__name__)

Selection = dict[frozenset[int], Configuration]
Run = tuple[Selection, int]


@dataclass(frozen=True)
class Decomposition:
    """f = (1/M) * sum of multiplicity * point."""

    m: int
    points: tuple[tuple[FractionalPoint, int], ...]

    def average(self) -> FractionalPoint:
        total: dict[Configuration, Fraction] = {}
        for point, mult in self.points:
            for k, x in point.items():
                total[k] = total.get(k, Fraction(0)) + mult * x
        return {k: x / self.m for k, x in total.items()}


def _selection_key(sel: Selection) -> tuple:
    return tuple(sorted((tuple(sorted(bag)), k) for bag, k in sel.items()))


def _sorted_runs(runs: Iterable[Run]) -> list[Run]:
    return sorted(runs, key=lambda run: _selection_key(run[0]))


def _zip_runs(left: list[Run], right: list[Run]) -> list[Run]:
    """Pair copies of two equally sized run lists in order, uniting the selections."""
    result: list[Run] = []
    i = j = 0
    left_rest = left[0][1] if left else 0
    right_rest = right[0][1] if right else 0
    while i < len(left) and j < len(right):
        take = min(left_rest, right_rest)
        result.append(({**left[i][0], **right[j][0]}, take))
        left_rest -= take
        right_rest -= take
        if left_rest == 0:
            i += 1
            left_rest = left[i][1] if i < len(left) else 0
        if right_rest == 0:
            j += 1
            right_rest = right[j][1] if j < len(right) else 0
    if i < len(left) or j < len(right):
        raise InfeasibleInput("Copy counts of joined subtrees differ")
    return result


def _split_runs(
    runs: list[Run], bag: frozenset[int], quotas: list[tuple[Configuration, int]]
) -> list[Run]:
    """Hand the copies out in order: the first quota to the first configuration, and so on."""
    result: list[Run] = []
    quota_iter = iter(quotas)
    current, rest = next(quota_iter, (None, 0))
    for sel, count in runs:
        while count:
            while rest == 0:
                try:
                    current, rest = next(quota_iter)
                except StopIteration:
                    raise InfeasibleInput(
                        f"Introduce quotas for bag {sorted(bag)} do not cover the child copies"
                    ) from None
            take = min(count, rest)
            result.append(({**sel, bag: current}, take))
            count -= take
            rest -= take
    if rest or next(quota_iter, None) is not None:
        raise InfeasibleInput(f"Introduce quotas for bag {sorted(bag)} exceed the child copies")
    return result


def _by_bag_value(runs: list[Run], bag: frozenset[int]) -> dict[Configuration, list[Run]]:
    groups: dict[Configuration, list[Run]] = {}
    for sel, count in runs:
        groups.setdefault(sel[bag], []).append((sel, count))
    return {k: _sorted_runs(group) for k, group in groups.items()}


def _copies(m: int, point: Mapping[Configuration, Fraction], k: Configuration) -> int:
    scaled = m * point.get(k, Fraction(0))
    if scaled.denominator != 1:
        raise InfeasibleInput(f"M = {m} does not clear the denominator of f({k.label()})")
    return int(scaled)


def decompose_lemma1(
    model: ExtendedModel, point: Mapping[Configuration, Fraction]
) -> Decomposition:
    """Write a feasible rational point of P(Q) as (1/M) sum of integral points.

    Raises:
        InfeasibleInput: ``point`` violates a constraint or bound of the model.
    """
    violated = check_point(model.lp, values_from_point(point))
    if violated:
        raise InfeasibleInput(
            f"Point violates {len(violated)} constraint(s): {', '.join(violated[:5])}"
        )
    configs = model.f_configurations()
    m = lcm_of_denominators(point.get(k, Fraction(0)) for k in configs)
    ntd = model.ntd

    built: dict[int, list[Run]] = {}
    for node in ntd.postorder():
        built[node.id] = _build_node(model, node, built, point, m)
        for child in node.children:
            del built[child]

    combined: list[Run] = [({}, m)]
    for root in ntd.roots:
        combined = _zip_runs(_sorted_runs(combined), _sorted_runs(built.pop(root)))

    merged: dict[tuple, tuple[FractionalPoint, int]] = {}
    for sel, count in combined:
        key = _selection_key(sel)
        if key in merged:
            merged[key] = (merged[key][0], merged[key][1] + count)
            continue
        chosen = set(sel.values())
        merged[key] = ({k: Fraction(int(k in chosen)) for k in configs}, count)
    points = tuple(merged[key] for key in sorted(merged))
    log.debug("decomposed point: M=%d, %d distinct integral points", m, len(points))
    return Decomposition(m, points)


def _build_node(
    model: ExtendedModel,
    node: NiceNode,
    built: dict[int, list[Run]],
    point: Mapping[Configuration, Fraction],
    m: int,
) -> list[Run]:
    bag = node.bag
    if node.kind is NodeKind.LEAF:
        runs = [({bag: k}, _copies(m, point, k)) for k in model.configs[bag]]
        return [run for run in runs if run[1]]

    children = [built[c] for c in node.children]
    if node.kind is NodeKind.JOIN:
        result = children[0]
        for other in children[1:]:
            left, right = _by_bag_value(result, bag), _by_bag_value(other, bag)
            result = []
            for k in sorted(set(left) | set(right)):
                result.extend(_zip_runs(left.get(k, []), right.get(k, [])))
        return result

    runs = children[0]
    if runs and bag in runs[0][0]:
        # Bag already selected lower in this subtree; consistent by connectivity.
        return runs

    if node.kind is NodeKind.FORGET:
        return [({**sel, bag: sel[_child_bag(model, node)].restrict(bag)}, count) for sel, count in runs]

    child_bag = _child_bag(model, node)
    extensions: dict[Configuration, list[tuple[Configuration, int]]] = {}
    for k in model.configs[bag]:
        copies = _copies(m, point, k)
        if copies:
            extensions.setdefault(k.restrict(child_bag), []).append((k, copies))
    result: list[Run] = []
    for k, group in _by_bag_value(runs, child_bag).items():
        result.extend(_split_runs(group, bag, extensions.get(k, [])))
    return result


def _child_bag(model: ExtendedModel, node: NiceNode) -> frozenset[int]:
    return model.ntd.nodes[node.children[0]].bag
