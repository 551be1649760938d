"""Tree decompositions of the constraint graph: min-fill heuristic, validation, nice form."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import networkx as nx

from csp_extform.errors import FormatError

log = logging.getLogger(__name__)


@dataclass
class TreeDecomposition:
    """An unrooted tree whose nodes carry a ``bag`` attribute (frozenset of vertices)."""

    tree: nx.Graph

    @classmethod
    def from_bags(
        cls, bags: Mapping[int, Iterable[int]], edges: Iterable[tuple[int, int]] = ()
    ) -> "TreeDecomposition":
        tree = nx.Graph()
        for node in sorted(bags):
            tree.add_node(node, bag=frozenset(bags[node]))
        tree.add_edges_from(edges)
        return cls(tree)

    def bag(self, node: int) -> frozenset[int]:
        return self.tree.nodes[node]["bag"]

    @property
    def bags(self) -> dict[int, frozenset[int]]:
        return {node: self.bag(node) for node in sorted(self.tree.nodes)}

    @property
    def node_count(self) -> int:
        return self.tree.number_of_nodes()

    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1


class NodeKind(str, Enum):
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True)
class NiceNode:
    id: int
    kind: NodeKind
    bag: frozenset[int]
    children: tuple[int, ...] = ()
    vertex: int | None = None


@dataclass
class NiceTreeDecomposition:
    """A rooted forest of typed nodes; one single-vertex root per component."""

    nodes: dict[int, NiceNode] = field(default_factory=dict)
    roots: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.nodes)

    def preorder(self) -> Iterator[NiceNode]:
        stack = [self.nodes[r] for r in reversed(self.roots)]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(self.nodes[c] for c in reversed(node.children))

    def postorder(self) -> list[NiceNode]:
        order = list(self.preorder())
        order.reverse()
        return order

    def nodes_of_kind(self, kind: NodeKind) -> list[NiceNode]:
        return [n for n in self.preorder() if n.kind is kind]

    def width(self) -> int:
        return max((len(n.bag) for n in self.nodes.values()), default=0) - 1

    def distinct_bags(self) -> list[frozenset[int]]:
        """Bags in first-seen pre-order; equal bags appear once."""
        seen: dict[frozenset[int], None] = {}
        for node in self.preorder():
            seen.setdefault(node.bag, None)
        return list(seen)

    def as_tree_decomposition(self) -> TreeDecomposition:
        """The underlying TD; component roots are chained so the node graph is a tree."""
        tree = nx.Graph()
        for node in self.nodes.values():
            tree.add_node(node.id, bag=node.bag)
            for c in node.children:
                tree.add_edge(node.id, c)
        tree.add_edges_from(zip(self.roots, self.roots[1:]))
        return TreeDecomposition(tree)

    def check(self) -> list[str]:
        """Return the violated nice-form invariants (empty when nice)."""
        problems: list[str] = []
        for root in self.roots:
            if len(self.nodes[root].bag) != 1:
                problems.append(f"root {root} bag has {len(self.nodes[root].bag)} vertices")
        for node in self.nodes.values():
            kids = [self.nodes[c] for c in node.children]
            if node.kind is NodeKind.LEAF:
                if kids or len(node.bag) != 1:
                    problems.append(f"leaf {node.id} must be childless with one vertex")
            elif node.kind is NodeKind.JOIN:
                if len(kids) != 2 or any(k.bag != node.bag for k in kids):
                    problems.append(f"join {node.id} needs two children with equal bags")
            elif len(kids) != 1:
                problems.append(f"{node.kind.value} {node.id} needs exactly one child")
            elif node.kind is NodeKind.INTRODUCE:
                child = kids[0]
                if node.vertex in child.bag or node.bag != child.bag | {node.vertex}:
                    problems.append(f"introduce {node.id} of {node.vertex} is malformed")
            elif node.kind is NodeKind.FORGET:
                child = kids[0]
                if node.vertex not in child.bag or node.bag != child.bag - {node.vertex}:
                    problems.append(f"forget {node.id} of {node.vertex} is malformed")
        return problems


@dataclass(frozen=True)
class TdIssue:
    kind: str
    detail: tuple[int, ...] = ()

    def __str__(self) -> str:
        return f"{self.kind}({', '.join(str(d) for d in self.detail)})"


# ---------------------------------------------------------------------------
# Heuristic decomposition
# ---------------------------------------------------------------------------

def _fill_in(adjacency: dict[int, set[int]], v: int) -> int:
    nbrs = sorted(adjacency[v])
    return sum(
        1
        for i, a in enumerate(nbrs)
        for b in nbrs[i + 1:]
        if b not in adjacency[a]
    )


def min_fill_ordering(g: nx.Graph) -> list[int]:
    """Greedy min-fill elimination order; ties go to the smallest vertex."""
    adjacency = {v: set(g.neighbors(v)) - {v} for v in g.nodes}
    order: list[int] = []
    while adjacency:
        v = min(adjacency, key=lambda u: (_fill_in(adjacency, u), u))
        nbrs = adjacency.pop(v)
        for a in nbrs:
            adjacency[a].discard(v)
            adjacency[a].update(nbrs - {a})
        order.append(v)
    return order


def heuristic_tree_decomposition(g: nx.Graph) -> TreeDecomposition:
    """Tree decomposition from the min-fill elimination ordering of ``g``.

    Each eliminated vertex contributes the bag of itself and its remaining
    neighbours, hung below the bag of the neighbour eliminated next. Bags
    contained in an adjacent bag are contracted away and the per-component
    trees are chained into one tree.
    """
    if g.number_of_nodes() == 0:
        return TreeDecomposition.from_bags({1: ()})

    order = min_fill_ordering(g)
    position = {v: i for i, v in enumerate(order)}
    adjacency = {v: set(g.neighbors(v)) - {v} for v in g.nodes}
    tree = nx.Graph()
    for i, v in enumerate(order, 1):
        nbrs = adjacency.pop(v)
        for a in nbrs:
            adjacency[a].discard(v)
            adjacency[a].update(nbrs - {a})
        tree.add_node(i, bag=frozenset(nbrs | {v}))
        if nbrs:
            tree.add_edge(i, position[min(nbrs, key=position.__getitem__)] + 1)

    _contract_subset_bags(tree)

    components = sorted((min(c) for c in nx.connected_components(tree)))
    tree.add_edges_from(zip(components, components[1:]))

    relabel = {old: new for new, old in enumerate(sorted(tree.nodes), 1)}
    td = TreeDecomposition(nx.relabel_nodes(tree, relabel))
    log.debug("min-fill decomposition: %d bags, width %d", td.node_count, td.width())
    return td


def _contract_subset_bags(tree: nx.Graph) -> None:
    """Merge every node into an adjacent node whose bag contains its own."""
    changed = True
    while changed:
        changed = False
        for a, b in sorted(tuple(sorted(e)) for e in tree.edges):
            for small, big in ((a, b), (b, a)):
                if tree.nodes[small]["bag"] <= tree.nodes[big]["bag"]:
                    for nb in list(tree.neighbors(small)):
                        if nb != big:
                            tree.add_edge(big, nb)
                    tree.remove_node(small)
                    changed = True
                    break
            if changed:
                break


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_td(g: nx.Graph, td: TreeDecomposition) -> list[TdIssue]:
    """Check the tree-decomposition invariants of ``td`` against ``g``, plus bag vertices outside ``g``."""
    issues: list[TdIssue] = []
    tree = td.tree
    if tree.number_of_nodes() == 0 or not nx.is_tree(tree):
        issues.append(TdIssue("NotATree"))

    holders: dict[int, list[int]] = {v: [] for v in g.nodes}
    for node, bag in td.bags.items():
        for v in bag:
            holders.setdefault(v, []).append(node)

    for v in sorted(g.nodes):
        if not holders[v]:
            issues.append(TdIssue("VertexUncovered", (v,)))
    for v in sorted(set(holders) - set(g.nodes)):
        issues.append(TdIssue("UnknownVertex", (v,)))
    bags = list(td.bags.values())
    for u, v in sorted(tuple(sorted(e)) for e in g.edges if e[0] != e[1]):
        if not any(u in b and v in b for b in bags):
            issues.append(TdIssue("EdgeUncovered", (u, v)))
    for v in sorted(holders):
        nodes = holders[v]
        if nodes and not nx.is_connected(tree.subgraph(nodes)):
            issues.append(TdIssue("DisconnectedOccurrence", (v,)))
    return issues


# ---------------------------------------------------------------------------
# Nice form
# ---------------------------------------------------------------------------

class _NiceBuilder:
    def __init__(self) -> None:
        self.nodes: dict[int, NiceNode] = {}

    def add(
        self,
        kind: NodeKind,
        bag: frozenset[int],
        children: tuple[int, ...] = (),
        vertex: int | None = None,
    ) -> int:
        node_id = len(self.nodes) + 1
        self.nodes[node_id] = NiceNode(node_id, kind, bag, children, vertex)
        return node_id

    def leaf_chain(self, bag: frozenset[int]) -> int:
        first, *rest = sorted(bag)
        current = frozenset({first})
        node = self.add(NodeKind.LEAF, current)
        for v in rest:
            current = current | {v}
            node = self.add(NodeKind.INTRODUCE, current, (node,), v)
        return node

    def transition(self, node: int, source: frozenset[int], target: frozenset[int]) -> int:
        current = source
        for v in sorted(source - target):
            current = current - {v}
            node = self.add(NodeKind.FORGET, current, (node,), v)
        for v in sorted(target - source):
            current = current | {v}
            node = self.add(NodeKind.INTRODUCE, current, (node,), v)
        return node


def make_nice(td: TreeDecomposition, root: int | None = None) -> NiceTreeDecomposition:
    """Normalize a valid TD into a nice forest with the same width.

    The tree is rooted at ``root`` (default: the lowest node id). Tree edges
    whose bags share no vertex separate independent components; each
    component ends in a forget chain down to a single-vertex root.
    """
    tree = td.tree
    if tree.number_of_nodes() == 0:
        return NiceTreeDecomposition()
    start = min(tree.nodes) if root is None else root
    if start not in tree:
        raise ValueError(f"Root {start} is not a node of the decomposition")

    builder = _NiceBuilder()
    component_starts: list[int] = [start]
    seen = {start}
    roots: list[int] = []

    def children_of(node: int) -> list[int]:
        kids = sorted(nb for nb in tree.neighbors(node) if nb not in seen)
        seen.update(kids)
        return kids

    def build(node: int) -> int | None:
        bag = td.bag(node)
        chains: list[int] = []
        for child in children_of(node):
            if not bag or not (td.bag(child) & bag):
                component_starts.append(child)
                continue
            sub = build(child)
            chains.append(builder.transition(sub, td.bag(child), bag))
        if not bag:
            return None
        if not chains:
            return builder.leaf_chain(bag)
        result = chains[0]
        for other in chains[1:]:
            result = builder.add(NodeKind.JOIN, bag, (result, other))
        return result

    while component_starts:
        top = component_starts.pop(0)
        built = build(top)
        if built is None:
            continue
        bag = td.bag(top)
        keep = min(bag)
        roots.append(builder.transition(built, bag, frozenset({keep})))

    ntd = NiceTreeDecomposition(builder.nodes, tuple(roots))
    log.debug("nice decomposition: %d nodes, %d components", len(ntd), len(roots))
    return ntd


def width(td: TreeDecomposition | NiceTreeDecomposition) -> int:
    return td.width()


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def parse_td(text: str) -> TreeDecomposition:
    """Parse ``b <id> <v>...`` bag lines and ``e <id1> <id2>`` edge lines."""
    bags: dict[int, list[int]] = {}
    edges: list[tuple[int, int]] = []
    for line_num, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] in ("c", "s"):
            continue
        try:
            numbers = [int(p) for p in parts[1:]]
        except ValueError:
            raise FormatError(f"Line {line_num}: non-integer value in {raw.strip()!r}") from None
        if parts[0] == "b" and numbers:
            if numbers[0] in bags:
                raise FormatError(f"Line {line_num}: duplicate bag id {numbers[0]}")
            bags[numbers[0]] = numbers[1:]
        elif parts[0] == "e" and len(numbers) == 2:
            edges.append((numbers[0], numbers[1]))
        else:
            raise FormatError(f"Line {line_num}: unrecognised TD line {raw.strip()!r}")
    for a, b in edges:
        if a not in bags or b not in bags:
            raise FormatError(f"Edge ({a}, {b}) references an undefined bag")
    return TreeDecomposition.from_bags(bags, edges)


def read_td(path: str | Path) -> TreeDecomposition:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"File not found: {p}")
    return parse_td(p.read_text())


def format_td(td: TreeDecomposition) -> str:
    lines = [f"c width {td.width()}"]
    for node, bag in td.bags.items():
        lines.append(" ".join(["b", str(node), *(str(v) for v in sorted(bag))]))
    for a, b in sorted(tuple(sorted(e)) for e in td.tree.edges):
        lines.append(f"e {a} {b}")
    return "\n".join(lines) + "\n"


def format_nice_td(ntd: NiceTreeDecomposition) -> str:
    """TD text of the nice forest, with one ``c`` line per node naming its kind."""
    lines = [f"c nice width {ntd.width()} nodes {len(ntd)} roots {' '.join(map(str, ntd.roots))}"]
    for node in ntd.preorder():
        suffix = f" {node.vertex}" if node.vertex is not None else ""
        lines.append(f"c {node.kind.value} {node.id}{suffix}")
    lines.append(format_td(ntd.as_tree_decomposition()).rstrip("\n"))
    return "\n".join(lines) + "\n"
