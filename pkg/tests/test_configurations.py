import pytest

from csp_extform.configurations import LAMBDA, Configuration, assign, enumerate_configurations, restrict
from csp_extform.instance import CspInstance, HardConstraint


def test_lambda_and_lookup():
    k = Configuration.of({2: 1, 1: 0})
    assert k.items == ((1, 0), (2, 1))
    assert k[1] == 0 and k[3] is None
    assert LAMBDA.label() == "L"
    assert k.label() == "1=0.2=1"


def test_restrict():
    k = Configuration.of({1: 0, 2: 1})
    assert restrict(LAMBDA, {1, 2}) == LAMBDA
    assert restrict(k, {2}) == Configuration.of({2: 1})
    assert restrict(k, k.support) == k


def test_assign():
    assert assign(LAMBDA, 1, 0) == Configuration.of({1: 0})
    assert assign(Configuration.of({1: 0}), 2, 1) == Configuration.of({1: 0, 2: 1})
    with pytest.raises(ValueError):
        assign(Configuration.of({1: 0}), 1, 1)


def test_enumerate_empty_support(is_k3):
    assert enumerate_configurations(is_k3, []) == [LAMBDA]


def test_enumerate_respects_hard_constraints_in_lex_order(is_k3):
    configs = enumerate_configurations(is_k3, {2, 1})
    assert [k.values_on((1, 2)) for k in configs] == [(0, 0), (0, 1), (1, 0)]
    assert len(enumerate_configurations(is_k3, {1, 2, 3})) == 4


def test_unsatisfiable_unary_gives_no_configurations():
    instance = CspInstance(1, ((0, 1),), hard=(HardConstraint((1,), frozenset()),))
    assert enumerate_configurations(instance, {1}) == []


def test_constraints_reaching_outside_the_support_are_ignored(is_k3):
    assert len(enumerate_configurations(is_k3, {1})) == 2
