from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from csp_extform.errors import DomainViolation, FormatError, InfeasibleAssignment, InstanceError
from csp_extform.instance import (
    CspInstance,
    HardConstraint,
    Sense,
    SoftConstraint,
    constraint_graph,
    extend,
    ingest,
    instance_from_dict,
    instance_to_dict,
    is_feasible,
    load_instance,
    objective_value,
    total_weight,
    validate,
)
from csp_extform.oracles import brute_force
from csp_extform.suite import random_instance


def _kinds(instance):
    return [str(i) for i in validate(instance)]


def test_is_k3_is_valid(is_k3):
    assert validate(is_k3) == []


def test_empty_domain_is_reported():
    instance = CspInstance(2, ((0, 1), ()))
    assert "EmptyDomain(2)" in _kinds(instance)


def test_unsorted_scope_is_reported():
    instance = CspInstance(2, ((0,), (0,)), hard=(HardConstraint((2, 1), frozenset({(0, 0)})),))
    assert any(k.startswith("UnsortedScope") for k in _kinds(instance))


def test_validation_catches_each_kind():
    instance = CspInstance(
        2,
        ((0, 1), (0, 0)),
        hard=(HardConstraint((1, 3), frozenset()), HardConstraint((1,), frozenset({(7,)}))),
        soft=(
            SoftConstraint.from_relation(0, (1,), [(1,)], weight=-1),
            SoftConstraint.from_relation(0, (), []),
        ),
    )
    kinds = {i.kind for i in validate(instance)}
    assert {
        "DuplicateDomainValue",
        "VariableOutOfRange",
        "TupleOutOfDomain",
        "NegativeWeight",
        "DuplicateSoftId",
        "EmptyScope",
    } <= kinds


def test_domain_count_mismatch():
    assert [i.kind for i in validate(CspInstance(3, ((0,),)))] == ["DomainCountMismatch"]


def test_ingest_merges_duplicate_hard_scopes():
    instance = CspInstance(
        2,
        ((0, 1), (0, 1)),
        hard=(
            HardConstraint((1, 2), frozenset({(0, 0), (0, 1), (1, 0)})),
            HardConstraint((1, 2), frozenset({(0, 1), (1, 0), (1, 1)})),
        ),
    )
    merged = ingest(instance)
    assert len(merged.hard) == 1
    assert merged.hard[0].allowed == {(0, 1), (1, 0)}


def test_ingest_raises_with_all_issues():
    with pytest.raises(InstanceError) as info:
        ingest(CspInstance(2, ((), ())))
    assert len(info.value.issues) == 2


def test_constraint_graph_examples(is_k3):
    clique = CspInstance(3, ((0,), (0,), (0,)), hard=(HardConstraint((1, 2, 3), frozenset({(0, 0, 0)})),))
    assert sorted(constraint_graph(clique).edges) == [(1, 2), (1, 3), (2, 3)]
    assert sorted(constraint_graph(is_k3).edges) == [(1, 2), (1, 3), (2, 3)]
    unary = CspInstance(2, ((0, 1), (0, 1)), soft=(SoftConstraint.from_relation(0, (1,), [(1,)]),))
    assert constraint_graph(unary).number_of_edges() == 0
    assert sorted(constraint_graph(unary).nodes) == [1, 2]


@settings(max_examples=40, derandomize=True, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.randoms(use_true_random=False))
def test_constraint_graph_ignores_constraint_order(seed, rng):
    instance = random_instance(seed)
    hard, soft = list(instance.hard), list(instance.soft)
    rng.shuffle(hard)
    rng.shuffle(soft)
    shuffled = replace(instance, hard=tuple(hard), soft=tuple(soft))
    edges = {frozenset(e) for e in constraint_graph(instance).edges}
    assert {frozenset(e) for e in constraint_graph(shuffled).edges} == edges
    assert set(constraint_graph(shuffled).nodes) == set(instance.variables)


def test_is_feasible(is_k3):
    assert is_feasible(is_k3, (0, 0, 0))
    assert not is_feasible(is_k3, (1, 1, 0))
    with pytest.raises(DomainViolation):
        is_feasible(is_k3, (0, 2, 0))
    with pytest.raises(DomainViolation):
        is_feasible(is_k3, (0, 0))


def test_extend(is_k3, maxcut_k3):
    assert extend(is_k3, (1, 0, 0)).h == (1, 0, 0)
    assert extend(is_k3, (0, 0, 0)).h == (0, 0, 0)
    assert extend(maxcut_k3, (0, 1, 1)).h == (1, 1, 0)
    with pytest.raises(InfeasibleAssignment):
        extend(is_k3, (1, 0, 1))


def test_objective_value(maxcut_k3, vc_k3):
    assert objective_value(maxcut_k3, (0, 1, 1)) == 2
    assert objective_value(vc_k3, (0, 0, 1)) == 2
    assert objective_value(CspInstance(2, ((0, 1), (0, 1))), (1, 0)) == 0


def test_payoff_form_min_uses_best_payoff():
    c = SoftConstraint(0, (1,), {(0,): Fraction(3, 2), (1,): Fraction(1, 2)}, Fraction(2), relation=False)
    instance = CspInstance(1, ((0, 1, 2),), soft=(c,), sense=Sense.MIN)
    assert instance.max_payoffs[0] == Fraction(3, 2)
    # value 2 pays nothing, so it misses the full best payoff
    assert objective_value(instance, (2,)) == 3
    assert objective_value(instance, (1,)) == 2


@settings(max_examples=40, derandomize=True, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_max_and_min_optima_sum_to_total_weight(seed):
    instance = random_instance(seed)
    if not all(c.relation for c in instance.soft):
        return
    flipped = CspInstance(
        instance.n, instance.domains, instance.hard, instance.soft,
        Sense.MIN if instance.sense is Sense.MAX else Sense.MAX,
    )
    a, b = brute_force(instance), brute_force(flipped)
    if a.feasible:
        assert a.optimum + b.optimum == total_weight(instance)


@settings(max_examples=30, derandomize=True, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_relation_form_objective_is_weighted_h(seed):
    instance = random_instance(seed)
    if instance.sense is not Sense.MAX or not all(c.relation for c in instance.soft):
        return
    best = brute_force(instance)
    if not best.feasible:
        return
    ex = extend(instance, best.witness)
    assert objective_value(instance, best.witness) == sum(
        (c.weight * h for c, h in zip(instance.soft, ex.h)), Fraction(0)
    )


def test_json_form(is_k3):
    data = instance_to_dict(is_k3)
    assert data["sense"] == "max"
    assert data["hard"][0] == {"scope": [1, 2], "allowed": [[0, 0], [0, 1], [1, 0]]}
    assert instance_from_dict(data) == is_k3


def test_json_payoff_entries():
    data = {
        "n": 1,
        "domains": [[0, 1]],
        "sense": "min",
        "soft": [{"scope": [1], "weight": "1/3", "payoff": [{"tuple": [1], "value": "5/2"}]}],
    }
    instance = instance_from_dict(data)
    assert instance.sense is Sense.MIN
    assert instance.soft[0].payoff == {(1,): Fraction(5, 2)}
    assert instance.soft[0].weight == Fraction(1, 3)


@pytest.mark.parametrize(
    "data",
    [
        {"domains": [[0]]},
        {"n": 1, "domains": [[0]], "sense": "sideways"},
        {"n": 1, "domains": [[0.5]]},
        {"n": 1, "domains": [[0]], "soft": [{"scope": [1], "weight": 0.5, "allowed": []}]},
        {"n": 1, "domains": [[0]], "soft": [{"scope": [1]}]},
        {"n": 1, "domains": [[0]], "hard": [{"scope": [1]}]},
    ],
)
def test_malformed_json_objects(data):
    with pytest.raises(FormatError):
        instance_from_dict(data)


def test_load_instance_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_instance(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(FormatError):
        load_instance(bad)
