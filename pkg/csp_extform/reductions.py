"""Graph problems encoded as CSP instances, with the maps back to their solutions."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import networkx as nx

from csp_extform.config import Settings
from csp_extform.errors import FormatError, UnknownProblem
from csp_extform.instance import (
    CspInstance,
    ExtendedAssignment,
    HardConstraint,
    Sense,
    SoftConstraint,
    ingest,
)
from csp_extform.pipeline import decompose, solve_instance
from csp_extform.projections import YgPoint, proj_V, proj_oct

log = logging.getLogger(__name__)

EMPTY_LIST_PLACEHOLDER = -1
"""Domain value standing in for an empty list; an empty unary relation forbids it."""

Edge = tuple[int, int]


@dataclass(frozen=True)
class GraphInput:
    """G = (V, E) with V = {1..n}, plus the per-problem annotations of the graph format."""

    n: int
    edges: tuple[Edge, ...] = ()
    perms: Mapping[Edge, tuple[int, ...]] = field(default_factory=dict, hash=False)
    terminals: tuple[int, ...] = ()
    lists: Mapping[int, tuple[int, ...]] = field(default_factory=dict, hash=False)
    h_edges: tuple[Edge, ...] = ()

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def sorted_edges(self) -> list[Edge]:
        """Each edge once, as (min, max), in sorted order."""
        return sorted({(min(u, v), max(u, v)) for u, v in self.edges})


@dataclass(frozen=True)
class CutSolution:
    parts: tuple[frozenset[int], ...]
    cut: tuple[Edge, ...]


@dataclass(frozen=True)
class ReductionOutput:
    problem: str
    instance: CspInstance
    recover: Callable[[ExtendedAssignment], Any] = field(compare=False)
    projection: str = "proj_V"
    claimed_size: str = ""


def check_graph(g: GraphInput) -> None:
    """Raise FormatError when the graph or its annotations are out of range."""
    for u, v in g.edges:
        if not (1 <= u <= g.n and 1 <= v <= g.n):
            raise FormatError(f"Edge ({u}, {v}) is out of range 1..{g.n}")
        if u == v:
            raise FormatError(f"Loop at vertex {u} is not allowed in G")
    if len(set(g.terminals)) != len(g.terminals):
        raise FormatError("Terminals must be distinct")
    for s in g.terminals:
        if not 1 <= s <= g.n:
            raise FormatError(f"Terminal {s} is out of range 1..{g.n}")
    edge_set = set(g.sorted_edges())
    for (u, v), images in g.perms.items():
        if (min(u, v), max(u, v)) not in edge_set:
            raise FormatError(f"Permutation given for non-edge ({u}, {v})")
        if sorted(images) != list(range(1, len(images) + 1)):
            raise FormatError(f"Permutation on ({u}, {v}) is not a bijection of [{len(images)}]")


def _build(problem: str, instance: CspInstance, recover: Callable, projection: str, size: str) -> ReductionOutput:
    out = ReductionOutput(problem, ingest(instance), recover, projection, size)
    log.debug(
        "%s: %d variables, %d hard, %d soft",
        problem, instance.n, len(instance.hard), len(instance.soft),
    )
    return out


def _edge_hard(g: GraphInput, allowed: Callable[[int, int], bool], domains: Sequence[Sequence[int]]) -> tuple[HardConstraint, ...]:
    hard = []
    for u, v in g.sorted_edges():
        pairs = frozenset(
            (a, b) for a in domains[u - 1] for b in domains[v - 1] if allowed(a, b)
        )
        hard.append(HardConstraint((u, v), pairs))
    return tuple(hard)


def _edge_soft(g: GraphInput, allowed: Sequence[tuple[int, int]]) -> tuple[SoftConstraint, ...]:
    return tuple(
        SoftConstraint.from_relation(i, (u, v), allowed) for i, (u, v) in enumerate(g.sorted_edges())
    )


def _labeling(ex: ExtendedAssignment) -> dict[int, int]:
    return {v: z for v, z in enumerate(proj_V(ex), 1)}


# ---------------------------------------------------------------------------
# Colouring family
# ---------------------------------------------------------------------------

def reduce_coloring(g: GraphInput, q: int) -> ReductionOutput:
    """Proper q-colouring: domains [q], disequality on every edge, no soft constraints."""
    check_graph(g)
    if q < 1:
        raise FormatError(f"Number of colours must be at least 1, got {q}")
    domains = tuple(tuple(range(1, q + 1)) for _ in g.vertices)
    hard = _edge_hard(g, lambda a, b: a != b, domains)
    return _build("coloring", CspInstance(g.n, domains, hard), _labeling, "proj_V", "q^tau n")


def reduce_list_h_coloring(
    g: GraphInput,
    h_edges: Sequence[Edge] | None = None,
    lists: Mapping[int, Sequence[int]] | None = None,
) -> ReductionOutput:
    """Homomorphism to H with f(v) in L(v); loops in H are allowed.

    Vertices without a list may use every vertex of H. An empty list becomes
    a placeholder value that an empty unary relation forbids.
    """
    check_graph(g)
    h_edges = tuple(g.h_edges if h_edges is None else h_edges)
    lists = dict(g.lists if lists is None else lists)
    h_vertices = sorted({a for e in h_edges for a in e} | {a for lst in lists.values() for a in lst})
    adjacent = {(a, b) for a, b in h_edges} | {(b, a) for a, b in h_edges}

    domains: list[tuple[int, ...]] = []
    empty: list[int] = []
    for v in g.vertices:
        allowed = tuple(sorted(set(lists.get(v, h_vertices))))
        if not allowed:
            empty.append(v)
            allowed = (EMPTY_LIST_PLACEHOLDER,)
        domains.append(allowed)
    hard = _edge_hard(g, lambda a, b: (a, b) in adjacent, domains)
    hard += tuple(HardConstraint((v,), frozenset()) for v in empty)
    instance = CspInstance(g.n, tuple(domains), hard)
    return _build("list-h-coloring", instance, _labeling, "proj_V", "|V_H|^tau n")


def reduce_list_coloring(g: GraphInput, q: int, lists: Mapping[int, Sequence[int]]) -> ReductionOutput:
    """List colouring: H = K_q without loops."""
    h_edges = list(itertools.combinations(range(1, q + 1), 2))
    full = {v: lists.get(v, range(1, q + 1)) for v in g.vertices}
    return reduce_list_h_coloring(g, h_edges, full)


def reduce_precoloring_extension(g: GraphInput, q: int, precolored: Mapping[int, int]) -> ReductionOutput:
    lists = {v: [precolored[v]] if v in precolored else list(range(1, q + 1)) for v in g.vertices}
    return reduce_list_coloring(g, q, lists)


def reduce_h_coloring(g: GraphInput, h_edges: Sequence[Edge]) -> ReductionOutput:
    h_vertices = sorted({a for e in h_edges for a in e})
    return reduce_list_h_coloring(g, h_edges, {v: h_vertices for v in g.vertices})


def chromatic_number(g: GraphInput, settings: Settings | None = None) -> int:
    """Smallest q whose colouring instance has a feasible point of P(Q).

    The search is linear in q and stops at width + 1 of the min-fill
    decomposition, which always suffices.
    """
    check_graph(g)
    if g.n == 0:
        return 0
    one_colour = reduce_coloring(g, 1).instance
    td, _ = decompose(one_colour)
    limit = max(td.width(), 0) + 1
    for q in range(1, limit + 1):
        instance = reduce_coloring(g, q).instance
        result = solve_instance(instance, settings=settings)
        log.debug("chromatic number: q=%d gives %s", q, result.status.value)
        if result.solution.optimal:
            return q
    raise RuntimeError(f"No colouring with at most {limit} colours found")


# ---------------------------------------------------------------------------
# Label and partition problems
# ---------------------------------------------------------------------------

def _permutation_for(g: GraphInput, t: int, u: int, v: int) -> dict[int, int]:
    """The map l(u) -> l(v) on edge {u, v}; identity when no permutation is given."""
    if (u, v) in g.perms:
        return {i: g.perms[(u, v)][i - 1] for i in range(1, t + 1)}
    if (v, u) in g.perms:
        return {g.perms[(v, u)][i - 1]: i for i in range(1, t + 1)}
    return {i: i for i in range(1, t + 1)}


def reduce_unique_games(g: GraphInput, t: int | None = None) -> ReductionOutput:
    """Max number of edges with pi_uv(l(u)) = l(v); labels [t]."""
    check_graph(g)
    if t is None:
        sizes = {len(p) for p in g.perms.values()}
        if len(sizes) != 1:
            raise FormatError("Unique Games needs --k or permutations of one common size")
        t = sizes.pop()
    if any(len(p) != t for p in g.perms.values()):
        raise FormatError(f"Every permutation must act on [{t}]")
    domains = tuple(tuple(range(1, t + 1)) for _ in g.vertices)
    soft = []
    for idx, (u, v) in enumerate(g.sorted_edges()):
        pi = _permutation_for(g, t, u, v)
        soft.append(SoftConstraint.from_relation(idx, (u, v), [(i, pi[i]) for i in range(1, t + 1)]))
    instance = CspInstance(g.n, domains, soft=tuple(soft), sense=Sense.MAX)
    return _build("unique-games", instance, _labeling, "proj_V", "t^tau n")


def _partition(ex: ExtendedAssignment, g: GraphInput, labels: Sequence[int]) -> CutSolution:
    z = proj_V(ex)
    parts = tuple(frozenset(v for v in g.vertices if z[v - 1] == label) for label in labels)
    cut = tuple((u, v) for u, v in g.sorted_edges() if z[u - 1] != z[v - 1])
    return CutSolution(parts, cut)


def reduce_multiway_cut(g: GraphInput, terminals: Sequence[int] | None = None) -> ReductionOutput:
    """Min number of cut edges separating the terminals; terminal s_i is pinned to label i."""
    check_graph(g)
    terminals = tuple(g.terminals if terminals is None else terminals)
    t = len(terminals)
    if t < 2:
        raise FormatError(f"Multiway Cut needs at least two terminals, got {t}")
    domains = tuple(tuple(range(1, t + 1)) for _ in g.vertices)
    hard = tuple(HardConstraint((s,), frozenset({(i,)})) for i, s in enumerate(terminals, 1))
    soft = _edge_soft(g, [(i, i) for i in range(1, t + 1)])
    instance = CspInstance(g.n, domains, hard, soft, Sense.MIN)
    labels = list(range(1, t + 1))
    return _build(
        "multiway-cut", instance, lambda ex: _partition(ex, g, labels), "proj_V", "t^tau n"
    )


def _two_sided(problem: str, g: GraphInput, sense: Sense) -> ReductionOutput:
    check_graph(g)
    domains = tuple((0, 1) for _ in g.vertices)
    soft = _edge_soft(g, [(0, 1), (1, 0)])
    instance = CspInstance(g.n, domains, soft=soft, sense=sense)
    return _build(problem, instance, lambda ex: _partition(ex, g, [0, 1]), "proj_V", "2^tau n")


def reduce_max_cut(g: GraphInput) -> ReductionOutput:
    return _two_sided("maxcut", g, Sense.MAX)


def reduce_edge_bipartization(g: GraphInput) -> ReductionOutput:
    """Fewest edges whose removal leaves a bipartite graph: Max Cut's constraints, minimized."""
    return _two_sided("edge-bipartization", g, Sense.MIN)


# ---------------------------------------------------------------------------
# Vertex selection problems
# ---------------------------------------------------------------------------

def _selected(value: int) -> Callable[[ExtendedAssignment], frozenset[int]]:
    def recover(ex: ExtendedAssignment) -> frozenset[int]:
        return frozenset(v for v, z in enumerate(proj_V(ex), 1) if z == value)

    return recover


def _cover_instance(g: GraphInput, sense: Sense) -> CspInstance:
    domains = tuple((0, 1) for _ in g.vertices)
    hard = _edge_hard(g, lambda a, b: (a, b) != (1, 1), domains)
    soft = tuple(SoftConstraint.from_relation(v, (v,), [(1,)]) for v in g.vertices)
    return CspInstance(g.n, domains, hard, soft, sense)


def reduce_vertex_cover(g: GraphInput) -> ReductionOutput:
    """Value 0 puts a vertex in the cover; Min counts the vertices missing C_v = {1}."""
    check_graph(g)
    return _build("vertex-cover", _cover_instance(g, Sense.MIN), _selected(0), "proj_V", "2^tau n")


def reduce_independent_set(g: GraphInput) -> ReductionOutput:
    """Value 1 puts a vertex in the set; same hard constraints as Vertex Cover, Max sense."""
    check_graph(g)
    return _build("independent-set", _cover_instance(g, Sense.MAX), _selected(1), "proj_V", "2^tau n")


def reduce_oct(g: GraphInput) -> ReductionOutput:
    """Value 2 deletes a vertex; the rest 2-colour G with colours 0 and 1."""
    check_graph(g)
    domains = tuple((0, 1, 2) for _ in g.vertices)
    hard = _edge_hard(g, lambda a, b: not (a == b and a in (0, 1)), domains)
    soft = tuple(SoftConstraint.from_relation(v, (v,), [(0,), (1,)]) for v in g.vertices)
    instance = CspInstance(g.n, domains, hard, soft, Sense.MIN)
    return _build("oct", instance, _deletion_set, "proj_oct", "3^tau n")


def deletion_set_from_point(point: YgPoint) -> frozenset[int]:
    """proj_OCT of an integral (y, g) point, read as a vertex set."""
    return frozenset(v for v, x in proj_oct(point).items() if x == 1)


def _deletion_set(ex: ExtendedAssignment) -> frozenset[int]:
    y = {(v, i): Fraction(int(z == i)) for v, z in enumerate(proj_V(ex), 1) for i in (0, 1, 2)}
    return deletion_set_from_point(YgPoint(y=y))


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

PROBLEMS: dict[str, Callable[[GraphInput, int | None], ReductionOutput]] = {
    "coloring": lambda g, k: reduce_coloring(g, _require_k("coloring", k)),
    "list-h-coloring": lambda g, k: reduce_list_h_coloring(g),
    "unique-games": lambda g, k: reduce_unique_games(g, k),
    "multiway-cut": lambda g, k: reduce_multiway_cut(g),
    "maxcut": lambda g, k: reduce_max_cut(g),
    "edge-bipartization": lambda g, k: reduce_edge_bipartization(g),
    "vertex-cover": lambda g, k: reduce_vertex_cover(g),
    "independent-set": lambda g, k: reduce_independent_set(g),
    "oct": lambda g, k: reduce_oct(g),
}


def _require_k(problem: str, k: int | None) -> int:
    if k is None:
        raise FormatError(f"'{problem}' needs --k")
    return k


def reduce(problem: str, g: GraphInput, k: int | None = None) -> ReductionOutput:
    try:
        builder = PROBLEMS[problem]
    except KeyError:
        raise UnknownProblem(
            f"Unknown problem '{problem}'; choose one of {', '.join(sorted(PROBLEMS))}"
        ) from None
    return builder(g, k)


# ---------------------------------------------------------------------------
# Solution checks
# ---------------------------------------------------------------------------

def _is_bipartite(g: GraphInput, removed: frozenset[int]) -> bool:
    residue = g.graph()
    residue.remove_nodes_from(removed)
    return nx.is_bipartite(residue)


def validate_solution(problem: str, g: GraphInput, solution: Any) -> list[str]:
    """Problem-level checks of a recovered solution; empty means valid."""
    problems: list[str] = []
    edges = g.sorted_edges()
    if problem == "coloring":
        problems += [f"edge ({u}, {v}) is monochromatic" for u, v in edges if solution[u] == solution[v]]
    elif problem == "list-h-coloring":
        adjacent = {(a, b) for a, b in g.h_edges} | {(b, a) for a, b in g.h_edges}
        problems += [f"edge ({u}, {v}) maps to a non-edge of H" for u, v in edges
                     if (solution[u], solution[v]) not in adjacent]
        problems += [f"vertex {v} is outside its list" for v, lst in g.lists.items() if solution[v] not in lst]
    elif problem == "multiway-cut":
        for i, s in enumerate(g.terminals):
            if s not in solution.parts[i]:
                problems.append(f"terminal {s} is not in part {i + 1}")
    elif problem in ("maxcut", "edge-bipartization"):
        covered = frozenset().union(*solution.parts)
        if covered != frozenset(g.vertices) or sum(len(p) for p in solution.parts) != g.n:
            problems.append("parts do not partition V")
    elif problem == "vertex-cover":
        problems += [f"edge ({u}, {v}) is uncovered" for u, v in edges if u not in solution and v not in solution]
    elif problem == "independent-set":
        problems += [f"edge ({u}, {v}) lies inside the set" for u, v in edges if u in solution and v in solution]
    elif problem == "oct":
        if not _is_bipartite(g, solution):
            problems.append("residual graph is not bipartite")
    elif problem != "unique-games":
        raise UnknownProblem(f"Unknown problem '{problem}'")
    return problems


def unique_games_value(g: GraphInput, t: int, labeling: Mapping[int, int]) -> Fraction:
    """Number of edges whose constraint the labeling satisfies."""
    satisfied = 0
    for u, v in g.sorted_edges():
        if _permutation_for(g, t, u, v)[labeling[u]] == labeling[v]:
            satisfied += 1
    return Fraction(satisfied)


# ---------------------------------------------------------------------------
# Graph text format
# ---------------------------------------------------------------------------

def parse_graph(text: str) -> GraphInput:
    """Parse ``p``/``e`` lines plus the ``t``, ``pi``, ``l`` and ``h`` extensions.

    ``p <n> <m>`` and the DIMACS ``p edge <n> <m>`` headers are both accepted.
    """
    n: int | None = None
    m: int | None = None
    edges: list[Edge] = []
    perms: dict[Edge, tuple[int, ...]] = {}
    terminals: tuple[int, ...] = ()
    lists: dict[int, tuple[int, ...]] = {}
    h_edges: list[Edge] = []
    for line_num, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag, args = parts[0], parts[1:]
        if tag == "p" and args and not args[0].lstrip("-").isdigit():
            args = args[1:]
        try:
            numbers = [int(a) for a in args]
        except ValueError:
            raise FormatError(f"Line {line_num}: non-integer value in {raw.strip()!r}") from None
        if tag == "p" and len(numbers) == 2:
            n, m = numbers
        elif tag == "e" and len(numbers) == 2:
            edges.append((numbers[0], numbers[1]))
        elif tag == "t":
            terminals = tuple(numbers)
        elif tag == "pi" and len(numbers) >= 3:
            perms[(numbers[0], numbers[1])] = tuple(numbers[2:])
        elif tag == "l" and numbers:
            lists[numbers[0]] = tuple(numbers[1:])
        elif tag == "h" and len(numbers) == 2:
            h_edges.append((numbers[0], numbers[1]))
        else:
            raise FormatError(f"Line {line_num}: unrecognised graph line {raw.strip()!r}")
    if n is None:
        raise FormatError("Graph file has no 'p <n> <m>' header")
    if m is not None and m != len(edges):
        raise FormatError(f"Header announces {m} edges, file lists {len(edges)}")
    g = GraphInput(n, tuple(edges), perms, terminals, lists, tuple(h_edges))
    check_graph(g)
    return g


def read_graph(path: str | Path) -> GraphInput:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"File not found: {p}")
    return parse_graph(p.read_text())


def format_graph(g: GraphInput) -> str:
    lines = [f"p {g.n} {len(g.edges)}"]
    lines += [f"e {u} {v}" for u, v in g.edges]
    if g.terminals:
        lines.append("t " + " ".join(map(str, g.terminals)))
    for (u, v), images in sorted(g.perms.items()):
        lines.append(f"pi {u} {v} " + " ".join(map(str, images)))
    for v, lst in sorted(g.lists.items()):
        lines.append(" ".join(["l", str(v), *map(str, lst)]))
    lines += [f"h {a} {b}" for a, b in g.h_edges]
    return "\n".join(lines) + "\n"
