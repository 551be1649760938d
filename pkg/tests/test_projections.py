import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from csp_extform.errors import NonIntegralInput
from csp_extform.extform import build_base_lp, build_extended_lp, encode_assignment, values_from_point
from csp_extform.instance import is_feasible
from csp_extform.lpmodel import check_point
from csp_extform.oracles import brute_force
from csp_extform.pipeline import decompose
from csp_extform.projections import (
    YgPoint,
    proj1,
    proj2,
    proj_E,
    proj_V,
    proj_id,
    proj_oct,
    witness_from_point,
)
from csp_extform.reductions import deletion_set_from_point
from csp_extform.suite import random_feasible_point, random_instance

FEASIBLE_IS_K3 = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


def _model(instance):
    _, ntd = decompose(instance)
    return build_extended_lp(instance, ntd)


def _mixture(model, assignments):
    point = {}
    share = Fraction(1, len(assignments))
    for z in assignments:
        for k, x in encode_assignment(model, z).items():
            point[k] = point.get(k, Fraction(0)) + share * x
    return point


def test_proj2_of_an_integral_point(is_k3):
    model = _model(is_k3)
    yg = proj2(model, encode_assignment(model, (1, 0, 0)))
    assert [yg.y[(v, i)] for v in (1, 2, 3) for i in (0, 1)] == [0, 1, 1, 0, 1, 0]
    chosen = {cid: k.values_on(model.scopes[cid]) for (cid, k), x in yg.g.items() if x == 1}
    assert chosen == {"h0": (1, 0), "h1": (1, 0), "h2": (0, 0), "s1": (1,), "s2": (0,), "s3": (0,)}


def test_proj2_of_the_uniform_point(is_k3):
    model = _model(is_k3)
    yg = proj2(model, _mixture(model, FEASIBLE_IS_K3))
    assert all(yg.y[(v, 1)] == Fraction(1, 4) for v in (1, 2, 3))
    assert not yg.is_integral()
    with pytest.raises(NonIntegralInput):
        proj1(is_k3, yg)


def test_proj2_single_variable(single_var):
    model = _model(single_var)
    yg = proj2(model, encode_assignment(model, (0,)))
    assert yg.y == {(1, 0): 1, (1, 1): 0}


def test_witness_from_point(is_k3):
    model = _model(is_k3)
    ex = witness_from_point(model, encode_assignment(model, (0, 1, 0)))
    assert proj_V(ex) == (0, 1, 0)
    assert proj_E(ex) == (0, 1, 0)
    assert proj_id(ex) is ex
    assert ex.h_by_id == {1: 0, 2: 1, 3: 0}


def test_proj_oct_reads_value_two():
    point = YgPoint(y={(v, i): Fraction(int(v == 3 and i == 2 or v != 3 and i == 0))
                       for v in (1, 2, 3) for i in (0, 1, 2)})
    assert proj_oct(point) == {1: 0, 2: 0, 3: 1}
    assert deletion_set_from_point(point) == {3}


@settings(max_examples=40, derandomize=True, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_proj2_lands_in_the_base_relaxation(seed):
    instance = random_instance(seed)
    model = _model(instance)
    if not brute_force(instance).feasible:
        return
    point = random_feasible_point(model, random.Random(seed))
    yg = proj2(model, point)
    assert check_point(build_base_lp(instance).lp, yg.as_values()) == []


def _integral_points(model):
    configs = model.f_configurations()
    for bits in itertools.product((0, 1), repeat=len(configs)):
        point = {k: Fraction(b) for k, b in zip(configs, bits)}
        if not check_point(model.lp, values_from_point(point)):
            yield point


def _assert_integral_points_match_assignments(instance):
    model = _model(instance)
    assert len(model.f_configurations()) <= 12
    feasible = {z for z in itertools.product(*instance.domains) if is_feasible(instance, z)}
    recovered = set()
    for point in _integral_points(model):
        z = witness_from_point(model, point).z
        assert encode_assignment(model, z) == point
        recovered.add(z)
    assert recovered == feasible


def test_integral_points_are_exactly_the_feasible_assignments(is_k3, single_var):
    for instance in (is_k3, single_var):
        _assert_integral_points_match_assignments(instance)


def test_integral_points_of_random_small_instances():
    checked = 0
    for seed in range(60):
        instance = random_instance(seed)
        if len(_model(instance).f_configurations()) <= 12:
            _assert_integral_points_match_assignments(instance)
            checked += 1
    assert checked >= 5
