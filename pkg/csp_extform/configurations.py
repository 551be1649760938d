"""Configurations: partial assignments over a vertex set that respect the hard constraints inside it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from csp_extform.instance import CspInstance


@dataclass(frozen=True, order=True)
class Configuration:
    """K in K(W): values on the support W, the symbol lambda everywhere else.

    Stored as ``(vertex, value)`` pairs sorted by vertex, so equality and
    hashing are structural and nodes with equal bags share configurations.
    """

    items: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, values: Mapping[int, int]) -> "Configuration":
        return cls(tuple(sorted(values.items())))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.items)

    def __getitem__(self, v: int) -> int | None:
        """K(v); None stands for lambda."""
        for u, value in self.items:
            if u == v:
                return value
        return None

    def values_on(self, scope: Iterable[int]) -> tuple[int, ...]:
        """The tuple of K over a scope contained in the support."""
        lookup = dict(self.items)
        return tuple(lookup[v] for v in scope)

    def restrict(self, vertices: Iterable[int]) -> "Configuration":
        keep = set(vertices)
        return Configuration(tuple((v, a) for v, a in self.items if v in keep))

    def assign(self, v: int, alpha: int) -> "Configuration":
        """K[v <- alpha] for v outside the support."""
        if any(u == v for u, _ in self.items):
            raise ValueError(f"Vertex {v} is already assigned in {self.label()}")
        return Configuration(tuple(sorted((*self.items, (v, alpha)))))

    def label(self) -> str:
        """``v1=a1.v2=a2``; the empty configuration is ``L``."""
        if not self.items:
            return "L"
        return ".".join(f"{v}={a}" for v, a in self.items)

    def __str__(self) -> str:
        return self.label()


LAMBDA = Configuration()


def restrict(k: Configuration, vertices: Iterable[int]) -> Configuration:
    return k.restrict(vertices)


def assign(k: Configuration, v: int, alpha: int) -> Configuration:
    return k.assign(v, alpha)


def enumerate_configurations(instance: CspInstance, vertices: Iterable[int]) -> list[Configuration]:
    """K(W) in lexicographic order of the values over sorted W.

    A tuple is kept iff every hard constraint with scope inside W admits its
    restriction. An empty list signals that W is locally infeasible.
    """
    support = sorted(set(vertices))
    position = {v: i for i, v in enumerate(support)}
    # Each hard constraint is checked once its last scope vertex is placed.
    checks: list[list] = [[] for _ in support]
    for c in instance.hard:
        if all(v in position for v in c.scope):
            checks[max(position[v] for v in c.scope)].append(c)

    result: list[Configuration] = []
    values: list[int] = []

    def extend(depth: int) -> None:
        if depth == len(support):
            result.append(Configuration(tuple(zip(support, values))))
            return
        for alpha in instance.domain(support[depth]):
            values.append(alpha)
            if all(c.admits(tuple(values[position[v]] for v in c.scope)) for c in checks[depth]):
                extend(depth + 1)
            values.pop()

    extend(0)
    return result
