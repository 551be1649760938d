"""Ground-truth solvers: exhaustive enumeration and the bag-configuration DP."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from csp_extform.configurations import Configuration, enumerate_configurations
from csp_extform.errors import CapExceeded, ScopeNotCovered
from csp_extform.instance import Assignment, CspInstance, Sense, SoftConstraint, restrict_assignment
from csp_extform.treedec import NiceTreeDecomposition, NodeKind

log = logging.getLogger(__name__)


class OracleStatus(str, Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class OracleResult:
    status: OracleStatus
    optimum: Fraction | None = None
    witness: Assignment | None = None
    count: int | None = None

    @property
    def feasible(self) -> bool:
        return self.status is OracleStatus.FEASIBLE


def _better(instance: CspInstance, value: Fraction, best: Fraction) -> bool:
    return value > best if instance.sense is Sense.MAX else value < best


def brute_force(instance: CspInstance, cap: int = 10**7) -> OracleResult:
    """Enumerate every assignment in lexicographic order.

    The first optimal assignment found is kept, so the witness is the
    lexicographically smallest optimum.

    Raises:
        CapExceeded: the product of the domain sizes is larger than ``cap``.
    """
    size = math.prod(len(d) for d in instance.domains)
    if size > cap:
        raise CapExceeded(f"Brute force over {size} assignments exceeds the cap of {cap}")

    best: Fraction | None = None
    witness: Assignment | None = None
    count = 0
    for z in itertools.product(*instance.domains):
        if not all(c.admits(restrict_assignment(z, c.scope)) for c in instance.hard):
            continue
        count += 1
        value = sum(
            (c.weight * instance.score(c, restrict_assignment(z, c.scope)) for c in instance.soft),
            Fraction(0),
        )
        if best is None or _better(instance, value, best):
            best, witness = value, tuple(z)

    log.debug("brute force: %d of %d assignments feasible", count, size)
    if witness is None:
        return OracleResult(OracleStatus.INFEASIBLE, count=0)
    return OracleResult(OracleStatus.FEASIBLE, best, witness, count)


# ---------------------------------------------------------------------------
# Dynamic program over a nice decomposition
# ---------------------------------------------------------------------------

Partial = tuple[tuple[int, int], ...]
Entry = tuple[Fraction, Partial]


def _merge(a: Partial, b: Partial) -> Partial:
    return tuple(sorted(a + b))


def _pick(current: Entry | None, candidate: Entry) -> Entry:
    """Higher payoff wins; equal payoff goes to the lexicographically smaller completion."""
    if current is None:
        return candidate
    if candidate[0] > current[0]:
        return candidate
    if candidate[0] == current[0] and [x for _, x in candidate[1]] < [x for _, x in current[1]]:
        return candidate
    return current


def treewidth_dp(instance: CspInstance, ntd: NiceTreeDecomposition) -> OracleResult:
    """Freuder's DP: one table per node, indexed by the configurations of its bag.

    Each entry keeps the best collected payoff below the node and the
    lexicographically smallest values of the forgotten vertices reaching it.
    Min instances are solved as Max on the payoff and converted back.
    """
    owner: dict[int, list[SoftConstraint]] = {}
    order = list(ntd.preorder())
    for c in instance.soft:
        node = next((n for n in order if set(c.scope) <= n.bag), None)
        if node is None:
            raise ScopeNotCovered(f"Scope {list(c.scope)} of soft constraint {c.id} is contained in no bag")
        owner.setdefault(node.id, []).append(c)
    for h in instance.hard:
        if not any(set(h.scope) <= n.bag for n in order):
            raise ScopeNotCovered(f"Scope {list(h.scope)} of a hard constraint is contained in no bag")

    def local(node_id: int, k: Configuration) -> Fraction:
        return sum(
            (c.weight * c.payoff_of(k.values_on(c.scope)) for c in owner.get(node_id, ())),
            Fraction(0),
        )

    tables: dict[int, dict[Configuration, Entry]] = {}
    entries = 0
    for node in ntd.postorder():
        table: dict[Configuration, Entry] = {}
        kids = [tables.pop(c) for c in node.children]
        if node.kind is NodeKind.LEAF:
            for k in enumerate_configurations(instance, node.bag):
                table[k] = (local(node.id, k), ())
        elif node.kind is NodeKind.INTRODUCE:
            child_bag = ntd.nodes[node.children[0]].bag
            for k in enumerate_configurations(instance, node.bag):
                below = kids[0].get(k.restrict(child_bag))
                if below is not None:
                    table[k] = (below[0] + local(node.id, k), below[1])
        elif node.kind is NodeKind.FORGET:
            best: dict[Configuration, Entry | None] = {}
            for k_child, (value, partial) in kids[0].items():
                k = k_child.restrict(node.bag)
                candidate = (value, _merge(partial, ((node.vertex, k_child[node.vertex]),)))
                best[k] = _pick(best.get(k), candidate)
            for k, entry in best.items():
                table[k] = (entry[0] + local(node.id, k), entry[1])
        else:
            left, right = kids
            for k, (value, partial) in left.items():
                other = right.get(k)
                if other is not None:
                    table[k] = (value + other[0] + local(node.id, k), _merge(partial, other[1]))
        entries += len(table)
        tables[node.id] = table

    total = Fraction(0)
    witness: dict[int, int] = {}
    for root in ntd.roots:
        chosen: Entry | None = None
        for k, (value, partial) in sorted(tables[root].items()):
            chosen = _pick(chosen, (value, _merge(partial, k.items)))
        if chosen is None:
            log.debug("treewidth DP: component rooted at %d is infeasible", root)
            return OracleResult(OracleStatus.INFEASIBLE)
        total += chosen[0]
        witness.update(chosen[1])

    missing = [v for v in instance.variables if v not in witness]
    if missing:
        raise ScopeNotCovered(f"Variables {missing} appear in no bag")
    if instance.sense is Sense.MIN:
        total = sum(
            (c.weight * instance.max_payoffs[c.id] for c in instance.soft), Fraction(0)
        ) - total
    log.debug("treewidth DP: %d table entries over %d nodes", entries, len(ntd))
    return OracleResult(
        OracleStatus.FEASIBLE, total, tuple(witness[v] for v in instance.variables)
    )
