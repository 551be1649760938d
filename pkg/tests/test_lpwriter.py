from fractions import Fraction

from csp_extform.extform import build_base_lp, build_extended_lp
from csp_extform.instance import Sense
from csp_extform.lpmodel import LpModel, Relation
from csp_extform.lpwriter import TERMS_PER_LINE, lp_name, write_lp
from csp_extform.pipeline import decompose
from csp_extform.reductions import reduce_coloring
from tests.helpers import complete_graph


def test_names_are_sanitized():
    assert lp_name("f_1=0.2=1") == "f_1#0.2#1"
    assert lp_name("y_1_-1") == "y_1_n1"


def test_decimal_and_scaled_rows():
    lp = LpModel("demo", Sense.MIN)
    lp.add_variable("x", "x")
    lp.add_variable("y", "x", upper=None)
    lp.add_constraint("half", {"x": Fraction(1, 2), "y": 1}, Relation.GE, Fraction(1, 4))
    lp.add_constraint("third", {"x": Fraction(1, 3), "y": Fraction(-2, 3)}, Relation.LE, 1)
    lp.add_objective("x", Fraction(1, 6))
    text = write_lp(lp)
    lines = text.splitlines()
    assert lines[0] == "\\ model demo"
    assert "minimize" in lines
    assert " half: +0.5 x +1 y >= 0.25" in lines
    assert "\\ scaled by 3: 1/3 x, -2/3 y, rhs 1" in lines
    assert " third: +1 x -2 y <= 3" in lines
    assert " obj: +1 x" in lines
    assert " 0 <= x <= 1" in lines and " y >= 0" in lines
    assert text.endswith("end\n")


def test_long_rows_wrap():
    lp = LpModel("wide")
    names = [f"v{i}" for i in range(TERMS_PER_LINE + 2)]
    for name in names:
        lp.add_variable(name, "x")
    lp.add_constraint("sum", {name: 1 for name in names}, Relation.EQ, 1)
    body = write_lp(lp).split("subject to\n")[1].split("bounds")[0].splitlines()
    assert len(body) == 2
    assert body[1].startswith("   +1 v8")


def test_empty_objective_and_stats_header(single_var):
    _, ntd = decompose(single_var)
    model = build_extended_lp(single_var, ntd)
    text = write_lp(model.lp, {"variables": 2, "constraints": 1})
    assert "\\ stats: variables=2 constraints=1" in text
    assert " obj: 0 f_1#0" in text
    assert write_lp(model.lp, {"variables": 2, "constraints": 1}) == text


def test_base_and_extended_use_different_variable_kinds(is_k3):
    base = write_lp(build_base_lp(is_k3).lp)
    _, ntd = decompose(is_k3)
    extended = write_lp(build_extended_lp(is_k3, ntd).lp)
    assert "y_1_0" in base and "f_" not in base
    assert "f_1#0" in extended and "y_1_0" not in extended


def test_empty_model():
    text = write_lp(LpModel("none", Sense.MAX))
    assert " obj:" in text.splitlines()


def test_empty_rows_of_an_infeasible_colouring_get_a_zero_term():
    instance = reduce_coloring(complete_graph(3), 1).instance
    _, ntd = decompose(instance)
    model = build_extended_lp(instance, ntd)
    assert any(not c.coeffs for c in model.lp.constraints)
    rows = write_lp(model.lp).split("subject to\n")[1].split("bounds")[0].splitlines()
    filler = lp_name(model.lp.variables[0].name)
    for row in rows:
        assert not row.partition(":")[2].strip().startswith("="), row
    assert f" c4_1_2_3: 0 {filler} = 1" in rows
    assert "zero_" not in write_lp(model.lp)


def test_constant_row_without_variables_uses_a_fixed_zero_column():
    lp = LpModel("none", Sense.MAX)
    lp.add_constraint("empty", {}, Relation.EQ, 1)
    text = write_lp(lp)
    assert " empty: 0 zero_ = 1" in text.splitlines()
    assert " zero_ = 0" in text.split("bounds\n")[1].splitlines()
