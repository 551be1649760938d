"""CSP instance model: validation, constraint graph, assignments and their extensions."""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import networkx as nx

from csp_extform.errors import (
    DomainViolation,
    FormatError,
    InfeasibleAssignment,
    InstanceError,
)
from csp_extform.rational import format_rational, parse_rational

log = logging.getLogger(__name__)

Assignment = tuple[int, ...]
"""Values z_1..z_n; position v-1 holds z_v."""


class Sense(str, Enum):
    MAX = "max"
    MIN = "min"


@dataclass(frozen=True)
class HardConstraint:
    scope: tuple[int, ...]
    allowed: frozenset[tuple[int, ...]]

    def admits(self, values: tuple[int, ...]) -> bool:
        return values in self.allowed


@dataclass(frozen=True)
class SoftConstraint:
    """A weighted soft constraint.

    Relation form stores the characteristic 0/1 payoff of the allowed tuples;
    payoff form stores an arbitrary rational per tuple. Tuples missing from
    ``payoff`` pay 0. A tuple satisfies the constraint iff its payoff is > 0.
    """

    id: int
    scope: tuple[int, ...]
    payoff: Mapping[tuple[int, ...], Fraction] = field(hash=False)
    weight: Fraction = Fraction(1)
    relation: bool = True

    @classmethod
    def from_relation(
        cls,
        id: int,
        scope: Sequence[int],
        allowed: Iterable[Sequence[int]],
        weight: Fraction | int = 1,
    ) -> "SoftConstraint":
        payoff = {tuple(t): Fraction(1) for t in allowed}
        return cls(id=id, scope=tuple(scope), payoff=payoff, weight=Fraction(weight))

    def payoff_of(self, values: tuple[int, ...]) -> Fraction:
        return self.payoff.get(values, Fraction(0))

    def satisfied_by(self, values: tuple[int, ...]) -> bool:
        return self.payoff_of(values) > 0


@dataclass(frozen=True)
class CspInstance:
    """Q = (V, D, H, C) with V = {1..n}."""

    n: int
    domains: tuple[tuple[int, ...], ...]
    hard: tuple[HardConstraint, ...] = ()
    soft: tuple[SoftConstraint, ...] = ()
    sense: Sense = Sense.MAX

    @property
    def variables(self) -> range:
        return range(1, self.n + 1)

    def domain(self, v: int) -> tuple[int, ...]:
        return self.domains[v - 1]

    @property
    def max_domain_size(self) -> int:
        return max((len(d) for d in self.domains), default=0)

    @cached_property
    def hard_by_scope(self) -> dict[tuple[int, ...], HardConstraint]:
        return {c.scope: c for c in self.hard}

    @cached_property
    def max_payoffs(self) -> dict[int, Fraction]:
        """Best achievable payoff per soft constraint id (1 for relation form)."""
        result: dict[int, Fraction] = {}
        for c in self.soft:
            if c.relation:
                result[c.id] = Fraction(1)
                continue
            product = 1
            for v in c.scope:
                product *= len(self.domain(v))
            values = list(c.payoff.values())
            if len(c.payoff) < product:
                values.append(Fraction(0))
            result[c.id] = max(values, default=Fraction(0))
        return result

    def score(self, c: SoftConstraint, values: tuple[int, ...]) -> Fraction:
        """Unweighted objective contribution of ``c`` on ``values`` for this sense.

        Max counts the payoff collected, Min the payoff missed
        (``max_payoff - payoff``; for relation form 1 iff unsatisfied).
        """
        if self.sense is Sense.MAX:
            return c.payoff_of(values)
        return self.max_payoffs[c.id] - c.payoff_of(values)


@dataclass(frozen=True)
class ExtendedAssignment:
    """ex(z) = (z, h): h has one 0/1 entry per soft constraint, in instance order."""

    z: Assignment
    h: tuple[int, ...]
    soft_ids: tuple[int, ...] = ()

    @property
    def h_by_id(self) -> dict[int, int]:
        return dict(zip(self.soft_ids, self.h))


@dataclass(frozen=True)
class ValidationIssue:
    kind: str
    location: str
    message: str = ""

    def __str__(self) -> str:
        text = f"{self.kind}({self.location})"
        return f"{text}: {self.message}" if self.message else text


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _scope_issues(
    instance: CspInstance, where: str, scope: tuple[int, ...]
) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []
    if not scope:
        issues.append(ValidationIssue("EmptyScope", where))
        return issues
    for v in scope:
        if not 1 <= v <= instance.n:
            issues.append(ValidationIssue("VariableOutOfRange", where, f"variable {v}"))
    if any(a >= b for a, b in zip(scope, scope[1:])):
        issues.append(ValidationIssue("UnsortedScope", where, f"scope {list(scope)}"))
    return issues


def _tuple_issues(
    instance: CspInstance, where: str, scope: tuple[int, ...], tuples: Iterable[tuple[int, ...]]
) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []
    for t in sorted(tuples):
        if len(t) != len(scope) or any(
            val not in instance.domain(v) for v, val in zip(scope, t)
        ):
            issues.append(ValidationIssue("TupleOutOfDomain", where, f"tuple {list(t)}"))
    return issues


def validate(instance: CspInstance) -> list[ValidationIssue]:
    """Return every invariant violation of ``instance``; empty means valid."""
    issues: list[ValidationIssue] = []
    if len(instance.domains) != instance.n:
        issues.append(
            ValidationIssue(
                "DomainCountMismatch", "domains",
                f"{len(instance.domains)} domains for n={instance.n}",
            )
        )
        return issues

    for v in instance.variables:
        dom = instance.domain(v)
        if not dom:
            issues.append(ValidationIssue("EmptyDomain", str(v)))
        elif len(set(dom)) != len(dom):
            issues.append(ValidationIssue("DuplicateDomainValue", str(v)))

    seen_hard: set[tuple[int, ...]] = set()
    for i, c in enumerate(instance.hard):
        where = f"hard[{i}]"
        scope_issues = _scope_issues(instance, where, c.scope)
        issues.extend(scope_issues)
        if scope_issues:
            continue
        issues.extend(_tuple_issues(instance, where, c.scope, c.allowed))
        if c.scope in seen_hard:
            issues.append(ValidationIssue("DuplicateHardScope", where, f"scope {list(c.scope)}"))
        seen_hard.add(c.scope)

    seen_ids: set[int] = set()
    for i, c in enumerate(instance.soft):
        where = f"soft[{i}]"
        if c.id in seen_ids:
            issues.append(ValidationIssue("DuplicateSoftId", where, f"id {c.id}"))
        seen_ids.add(c.id)
        if c.weight < 0:
            issues.append(ValidationIssue("NegativeWeight", where, format_rational(c.weight)))
        if c.relation and any(p not in (0, 1) for p in c.payoff.values()):
            issues.append(ValidationIssue("PayoffOutOfRange", where, "relation payoff not 0/1"))
        scope_issues = _scope_issues(instance, where, c.scope)
        issues.extend(scope_issues)
        if not scope_issues:
            issues.extend(_tuple_issues(instance, where, c.scope, c.payoff))
    return issues


def merge_hard_constraints(instance: CspInstance) -> CspInstance:
    """Intersect the allowed sets of hard constraints sharing a scope."""
    merged: dict[tuple[int, ...], frozenset[tuple[int, ...]]] = {}
    for c in instance.hard:
        if c.scope in merged:
            merged[c.scope] = merged[c.scope] & c.allowed
        else:
            merged[c.scope] = c.allowed
    if len(merged) == len(instance.hard):
        return instance
    log.debug("merged %d hard constraints into %d scopes", len(instance.hard), len(merged))
    hard = tuple(HardConstraint(scope, allowed) for scope, allowed in merged.items())
    return CspInstance(instance.n, instance.domains, hard, instance.soft, instance.sense)


def ingest(instance: CspInstance) -> CspInstance:
    """Validate and normalize an instance for the rest of the pipeline.

    Raises:
        InstanceError: on any issue other than a duplicate hard scope,
            which is resolved by merging.
    """
    issues = [i for i in validate(instance) if i.kind != "DuplicateHardScope"]
    if issues:
        raise InstanceError(issues)
    return merge_hard_constraints(instance)


# ---------------------------------------------------------------------------
# Graph and assignments
# ---------------------------------------------------------------------------

def constraint_graph(instance: CspInstance) -> nx.Graph:
    """Vertices 1..n; u~v iff u and v share the scope of some hard or soft constraint."""
    g = nx.Graph()
    g.add_nodes_from(instance.variables)
    for c in (*instance.hard, *instance.soft):
        g.add_edges_from(itertools.combinations(c.scope, 2))
    return g


def restrict_assignment(z: Assignment, scope: Sequence[int]) -> tuple[int, ...]:
    """z|_U for a sorted scope U."""
    return tuple(z[v - 1] for v in scope)


def _check_domains(instance: CspInstance, z: Assignment) -> None:
    if len(z) != instance.n:
        raise DomainViolation(f"Assignment has {len(z)} values, instance has {instance.n} variables")
    for v in instance.variables:
        if z[v - 1] not in instance.domain(v):
            raise DomainViolation(f"z_{v} = {z[v - 1]} is not in D_{v}")


def is_feasible(instance: CspInstance, z: Assignment) -> bool:
    _check_domains(instance, z)
    return all(c.admits(restrict_assignment(z, c.scope)) for c in instance.hard)


def _require_feasible(instance: CspInstance, z: Assignment) -> None:
    if not is_feasible(instance, z):
        raise InfeasibleAssignment(f"Assignment {list(z)} violates a hard constraint")


def extend(instance: CspInstance, z: Assignment) -> ExtendedAssignment:
    _require_feasible(instance, z)
    h = tuple(int(c.satisfied_by(restrict_assignment(z, c.scope))) for c in instance.soft)
    return ExtendedAssignment(z=tuple(z), h=h, soft_ids=tuple(c.id for c in instance.soft))


def objective_value(instance: CspInstance, z: Assignment) -> Fraction:
    _require_feasible(instance, z)
    return sum(
        (c.weight * instance.score(c, restrict_assignment(z, c.scope)) for c in instance.soft),
        Fraction(0),
    )


def total_weight(instance: CspInstance) -> Fraction:
    return sum((c.weight for c in instance.soft), Fraction(0))


# ---------------------------------------------------------------------------
# JSON format
# ---------------------------------------------------------------------------

def _int_tuple(raw: Any, what: str) -> tuple[int, ...]:
    if not isinstance(raw, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in raw):
        raise FormatError(f"{what} must be a list of integers, got {raw!r}")
    return tuple(raw)


def instance_from_dict(data: Mapping[str, Any]) -> CspInstance:
    """Build an (unvalidated) instance from the JSON object form."""
    try:
        n = data["n"]
        raw_domains = data["domains"]
    except (KeyError, TypeError):
        raise FormatError("Instance JSON needs 'n' and 'domains'") from None
    if not isinstance(n, int) or n < 0:
        raise FormatError(f"'n' must be a non-negative integer, got {n!r}")
    if not isinstance(raw_domains, list):
        raise FormatError("'domains' must be a list of lists")
    domains = tuple(tuple(sorted(_int_tuple(d, "domain"))) for d in raw_domains)

    try:
        sense = Sense(str(data.get("sense", "max")).lower())
    except ValueError:
        raise FormatError(f"'sense' must be 'max' or 'min', got {data.get('sense')!r}") from None

    hard: list[HardConstraint] = []
    for entry in data.get("hard", []):
        try:
            scope = _int_tuple(entry["scope"], "scope")
            allowed = frozenset(_int_tuple(t, "tuple") for t in entry["allowed"])
        except (KeyError, TypeError):
            raise FormatError(f"Hard constraint needs 'scope' and 'allowed': {entry!r}") from None
        hard.append(HardConstraint(scope, allowed))

    soft: list[SoftConstraint] = []
    for idx, entry in enumerate(data.get("soft", [])):
        try:
            scope = _int_tuple(entry["scope"], "scope")
        except (KeyError, TypeError):
            raise FormatError(f"Soft constraint needs 'scope': {entry!r}") from None
        cid = entry.get("id", idx)
        weight = parse_rational(entry.get("weight", "1"))
        if "allowed" in entry:
            allowed = [_int_tuple(t, "tuple") for t in entry["allowed"]]
            soft.append(SoftConstraint.from_relation(cid, scope, allowed, weight))
        elif "payoff" in entry:
            payoff: dict[tuple[int, ...], Fraction] = {}
            for item in entry["payoff"]:
                try:
                    payoff[_int_tuple(item["tuple"], "tuple")] = parse_rational(item["value"])
                except (KeyError, TypeError):
                    raise FormatError(f"Payoff entries need 'tuple' and 'value': {item!r}") from None
            soft.append(SoftConstraint(cid, scope, payoff, weight, relation=False))
        else:
            raise FormatError(f"Soft constraint needs 'allowed' or 'payoff': {entry!r}")

    return CspInstance(n, domains, tuple(hard), tuple(soft), sense)


def instance_to_dict(instance: CspInstance) -> dict[str, Any]:
    """Canonical JSON object form (sorted tuples, rationals as text)."""
    soft: list[dict[str, Any]] = []
    for c in instance.soft:
        entry: dict[str, Any] = {
            "id": c.id,
            "scope": list(c.scope),
            "weight": format_rational(c.weight),
        }
        if c.relation:
            entry["allowed"] = [list(t) for t in sorted(c.payoff) if c.payoff[t] == 1]
        else:
            entry["payoff"] = [
                {"tuple": list(t), "value": format_rational(c.payoff[t])} for t in sorted(c.payoff)
            ]
        soft.append(entry)
    return {
        "n": instance.n,
        "domains": [list(d) for d in instance.domains],
        "sense": instance.sense.value,
        "hard": [
            {"scope": list(c.scope), "allowed": [list(t) for t in sorted(c.allowed)]}
            for c in instance.hard
        ],
        "soft": soft,
    }


def load_instance(path: str | Path) -> CspInstance:
    """Read, validate and normalize an instance JSON file."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"File not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"'{p.name}' is not valid JSON: {e}") from None
    return ingest(instance_from_dict(data))


def dump_instance(instance: CspInstance, path: str | Path) -> Path:
    p = Path(path)
    p.write_text(json.dumps(instance_to_dict(instance), indent=2) + "\n")
    return p
