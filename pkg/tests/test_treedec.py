import networkx as nx
import pytest
from hypothesis import given, settings

from csp_extform.errors import FormatError
from csp_extform.treedec import (
    NodeKind,
    TreeDecomposition,
    format_nice_td,
    format_td,
    heuristic_tree_decomposition,
    make_nice,
    parse_td,
    validate_td,
    width,
)
from tests.helpers import complete_graph, graphs, path_graph


def test_min_fill_on_k3_is_one_bag():
    td = heuristic_tree_decomposition(complete_graph(3).graph())
    assert list(td.bags.values()) == [frozenset({1, 2, 3})]
    assert width(td) == 2


def test_min_fill_on_a_path():
    td = heuristic_tree_decomposition(path_graph(3).graph())
    assert sorted(sorted(b) for b in td.bags.values()) == [[1, 2], [2, 3]]
    assert td.width() == 1


def test_empty_graph_gets_one_empty_bag():
    td = heuristic_tree_decomposition(nx.Graph())
    assert td.bags == {1: frozenset()}
    assert len(make_nice(td)) == 0


def test_singleton_width_zero():
    g = nx.Graph()
    g.add_node(1)
    assert heuristic_tree_decomposition(g).width() == 0


@settings(max_examples=60, derandomize=True, deadline=None)
@given(graphs(max_n=8))
def test_heuristic_decomposition_is_valid_and_nice_form_keeps_width(g):
    graph = g.graph()
    td = heuristic_tree_decomposition(graph)
    assert validate_td(graph, td) == []
    ntd = make_nice(td)
    assert ntd.check() == []
    assert ntd.width() == td.width()
    assert validate_td(graph, ntd.as_tree_decomposition()) == []
    assert all(len(n.bag) == 1 for n in ntd.nodes_of_kind(NodeKind.LEAF))
    assert len(ntd) <= 4 * (td.width() + 1) * max(g.n, 1) + 2 * g.n


def test_validate_reports_broken_subtree():
    g = nx.Graph()
    g.add_nodes_from([1, 2])
    td = TreeDecomposition.from_bags({1: [1], 2: [2], 3: [1]}, [(1, 2), (2, 3)])
    assert [str(i) for i in validate_td(g, td)] == ["DisconnectedOccurrence(1)"]


def test_validate_reports_uncovered_items_and_cycles():
    g = path_graph(3).graph()
    td = TreeDecomposition.from_bags({1: [1, 2], 2: [2]}, [(1, 2)])
    kinds = [str(i) for i in validate_td(g, td)]
    assert "VertexUncovered(3)" in kinds and "EdgeUncovered(2, 3)" in kinds
    cyclic = TreeDecomposition.from_bags({1: [1, 2], 2: [2, 3], 3: [2]}, [(1, 2), (2, 3), (3, 1)])
    assert "NotATree()" in [str(i) for i in validate_td(g, cyclic)]


def test_validate_reports_vertices_outside_the_graph():
    g = complete_graph(3).graph()
    td = TreeDecomposition.from_bags({1: [0, 1, 2, 3, 4]}, [])
    assert [str(i) for i in validate_td(g, td)] == ["UnknownVertex(0)", "UnknownVertex(4)"]


def test_nice_form_of_a_path_decomposition():
    td = TreeDecomposition.from_bags({1: [1, 2], 2: [2, 3]}, [(1, 2)])
    ntd = make_nice(td)
    assert ntd.check() == []
    assert len(ntd) <= 8
    assert ntd.width() == 1
    root = ntd.nodes[ntd.roots[0]]
    assert len(root.bag) == 1


def test_join_nodes_for_a_star():
    star = nx.star_graph([1, 2, 3, 4])
    ntd = make_nice(heuristic_tree_decomposition(star))
    assert ntd.check() == []
    joins = ntd.nodes_of_kind(NodeKind.JOIN)
    assert joins and all(len(ntd.nodes[c].bag) == len(j.bag) for j in joins for c in j.children)


def test_disjoint_bags_become_separate_components():
    td = TreeDecomposition.from_bags({1: [1, 2], 2: [3, 4]}, [(1, 2)])
    ntd = make_nice(td)
    assert len(ntd.roots) == 2
    assert ntd.check() == []


def test_root_choice():
    td = TreeDecomposition.from_bags({1: [1, 2], 2: [2, 3], 3: [3, 4]}, [(1, 2), (2, 3)])
    ntd = make_nice(td, root=3)
    assert ntd.check() == []
    assert ntd.nodes[ntd.roots[0]].bag == frozenset({3})
    with pytest.raises(ValueError):
        make_nice(td, root=9)


def test_text_format():
    td = TreeDecomposition.from_bags({1: [1, 2], 2: [2, 3]}, [(1, 2)])
    text = format_td(td)
    assert text == "c width 1\nb 1 1 2\nb 2 2 3\ne 1 2\n"
    assert parse_td(text).bags == td.bags
    assert "c leaf" in format_nice_td(make_nice(td))


@pytest.mark.parametrize(
    "text",
    ["b 1 1\nb 1 2\n", "b 1 1\ne 1 2\n", "x 1 2\n", "b 1 one\n"],
)
def test_parse_td_errors(text):
    with pytest.raises(FormatError):
        parse_td(text)
