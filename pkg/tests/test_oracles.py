from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from csp_extform.errors import CapExceeded, ScopeNotCovered
from csp_extform.instance import CspInstance, SoftConstraint
from csp_extform.oracles import OracleStatus, brute_force, treewidth_dp
from csp_extform.pipeline import decompose
from csp_extform.reductions import reduce_max_cut
from csp_extform.suite import random_instance
from csp_extform.treedec import TreeDecomposition, make_nice
from tests.helpers import path_graph


def test_brute_force_is_k3(is_k3):
    result = brute_force(is_k3)
    assert result.optimum == 1
    assert result.count == 4
    assert result.witness == (0, 0, 1)


def test_brute_force_infeasible(k4_three_colours):
    result = brute_force(k4_three_colours)
    assert result.status is OracleStatus.INFEASIBLE
    assert result.optimum is None


def test_brute_force_empty_instance():
    result = brute_force(CspInstance(2, ((0, 1), (0, 1, 2))))
    assert result.optimum == 0
    assert result.count == 6
    assert result.witness == (0, 0)


def test_brute_force_cap(is_k3):
    with pytest.raises(CapExceeded):
        brute_force(is_k3, cap=7)


def test_dp_examples(is_k3):
    _, ntd = decompose(is_k3)
    assert treewidth_dp(is_k3, ntd).optimum == 1
    p3 = reduce_max_cut(path_graph(3)).instance
    assert treewidth_dp(p3, decompose(p3)[1]).optimum == 2
    single = CspInstance(1, ((0, 1),), soft=(SoftConstraint.from_relation(0, (1,), [(1,)], Fraction(5, 2)),))
    result = treewidth_dp(single, decompose(single)[1])
    assert result.optimum == Fraction(5, 2)
    assert result.witness == (1,)


def test_dp_infeasible(k4_three_colours):
    _, ntd = decompose(k4_three_colours)
    assert treewidth_dp(k4_three_colours, ntd).status is OracleStatus.INFEASIBLE


def test_dp_needs_covered_scopes(maxcut_p3):
    ntd = make_nice(TreeDecomposition.from_bags({1: [1], 2: [2], 3: [3]}, [(1, 2), (2, 3)]))
    with pytest.raises(ScopeNotCovered):
        treewidth_dp(maxcut_p3, ntd)


@settings(max_examples=80, derandomize=True, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_dp_matches_brute_force(seed):
    instance = random_instance(seed)
    brute = brute_force(instance)
    td, ntd = decompose(instance)
    for nice in (ntd, make_nice(td, root=max(td.tree.nodes))):
        dp = treewidth_dp(instance, nice)
        assert dp.status == brute.status
        assert dp.optimum == brute.optimum
        if dp.feasible:
            assert dp.witness == brute.witness
