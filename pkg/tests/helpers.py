"""Graph builders, hypothesis strategies and direct enumerators shared by the tests.

The enumerators solve each graph problem straight from its definition, without
going through a CSP encoding, so they can referee the reductions.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import networkx as nx
from hypothesis import strategies as st

from csp_extform.reductions import GraphInput


def complete_graph(n: int) -> GraphInput:
    return GraphInput(n, tuple(itertools.combinations(range(1, n + 1), 2)))


def cycle_graph(n: int) -> GraphInput:
    return GraphInput(n, tuple((v, v % n + 1) for v in range(1, n + 1)))


def path_graph(n: int) -> GraphInput:
    return GraphInput(n, tuple((v, v + 1) for v in range(1, n)))


def edgeless_graph(n: int) -> GraphInput:
    return GraphInput(n)


@st.composite
def graphs(draw, max_n: int = 6) -> GraphInput:
    n = draw(st.integers(min_value=1, max_value=max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return GraphInput(n, tuple(edges))


def random_graph(seed: int, max_n: int = 8, density: float = 0.35) -> GraphInput:
    rng = random.Random(seed)
    n = rng.randint(1, max_n)
    pairs = itertools.combinations(range(1, n + 1), 2)
    return GraphInput(n, tuple(p for p in pairs if rng.random() < density))


def _subsets(vertices):
    vertices = list(vertices)
    for r in range(len(vertices) + 1):
        yield from (frozenset(c) for c in itertools.combinations(vertices, r))


def max_cut(g: GraphInput) -> int:
    return max(
        sum(1 for u, v in g.sorted_edges() if (u in side) != (v in side))
        for side in _subsets(g.vertices)
    )


def max_independent_set(g: GraphInput) -> int:
    return max(
        len(s) for s in _subsets(g.vertices)
        if not any(u in s and v in s for u, v in g.sorted_edges())
    )


def min_vertex_cover(g: GraphInput) -> int:
    return min(
        len(s) for s in _subsets(g.vertices)
        if all(u in s or v in s for u, v in g.sorted_edges())
    )


def min_oct(g: GraphInput) -> int:
    graph = g.graph()
    for s in sorted(_subsets(g.vertices), key=len):
        rest = graph.copy()
        rest.remove_nodes_from(s)
        if nx.is_bipartite(rest):
            return len(s)
    raise AssertionError("deleting every vertex always leaves a bipartite graph")


def chromatic(g: GraphInput) -> int:
    edges = g.sorted_edges()
    for q in range(1, g.n + 1):
        for colours in itertools.product(range(q), repeat=g.n):
            if all(colours[u - 1] != colours[v - 1] for u, v in edges):
                return q
    return max(g.n, 1)


def min_multiway_cut(g: GraphInput) -> int:
    t = len(g.terminals)
    best = None
    for labels in itertools.product(range(1, t + 1), repeat=g.n):
        if any(labels[s - 1] != i for i, s in enumerate(g.terminals, 1)):
            continue
        cut = sum(1 for u, v in g.sorted_edges() if labels[u - 1] != labels[v - 1])
        best = cut if best is None else min(best, cut)
    return best


def best_unique_games(g: GraphInput, t: int) -> Fraction:
    def image(u: int, v: int, a: int) -> int:
        if (u, v) in g.perms:
            return g.perms[(u, v)][a - 1]
        if (v, u) in g.perms:
            return g.perms[(v, u)].index(a) + 1
        return a

    return Fraction(max(
        sum(1 for u, v in g.sorted_edges() if image(u, v, labels[u - 1]) == labels[v - 1])
        for labels in itertools.product(range(1, t + 1), repeat=g.n)
    ))
