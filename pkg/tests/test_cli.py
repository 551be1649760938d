import json

import pytest

from csp_extform import __version__
from csp_extform.cli import build_parser, run
from csp_extform.config import EXIT_FAILURE, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK
from csp_extform.reductions import format_graph
from tests.helpers import complete_graph, cycle_graph


def _artifact(out, label):
    matches = sorted(out.glob(f"*_{label}"))
    assert matches, f"no {label} in {out}"
    return matches[-1]


def _json(out, label):
    return json.loads(_artifact(out, label).read_text())


def test_solve_is_k3(is_k3, write_instance, tmp_path):
    out = tmp_path / "run"
    assert run(["--out", str(out), "solve", str(write_instance(is_k3))]) == EXIT_OK
    report = _json(out, "report.json")
    assert report["status"] == "Optimal"
    assert report["optimum"] == "1"
    assert report["integral"] is True
    witness = _json(out, "witness.json")
    assert sum(witness["z"]) == 1
    assert witness["objective"] == "1"
    assert _artifact(out, "stats.csv").read_text().startswith("variables,constraints,nonzeros")


def test_solve_reports_are_reproducible(is_k3, write_instance, tmp_path):
    path = write_instance(is_k3)
    runs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run(["--out", str(out), "solve", str(path), "--check"]) == EXIT_OK
        report = _json(out, "report.json")
        report.pop("wall_time")
        runs.append((report, _json(out, "witness.json")))
    assert runs[0] == runs[1]
    assert all(runs[0][0]["oracles"].values())


def test_solve_base_relaxation_and_tableau(is_k3, write_instance, tmp_path):
    out = tmp_path / "run"
    code = run(["--out", str(out), "solve", str(write_instance(is_k3)), "--base", "--dump-tableau"])
    assert code == EXIT_OK
    assert _json(out, "report.json")["optimum"] == "3/2"
    assert _artifact(out, "tableau.txt").read_text().startswith("objective row")


def test_infeasible_instance_exits_10(k4_three_colours, write_instance, tmp_path):
    path = write_instance(k4_three_colours)
    assert run(["--out", str(tmp_path / "a"), "solve", str(path)]) == EXIT_INFEASIBLE
    assert run(["--out", str(tmp_path / "b"), "oracle", str(path)]) == EXIT_INFEASIBLE


def test_malformed_json_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert run(["--out", str(tmp_path / "run"), "solve", str(bad)]) == EXIT_INPUT


def test_invalid_instance_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "domains": [[0, 1], []]}))
    assert run(["--out", str(tmp_path / "run"), "solve", str(bad)]) == EXIT_INPUT


def test_missing_file_exits_2(tmp_path):
    assert run(["--out", str(tmp_path / "run"), "solve", str(tmp_path / "nope.json")]) == EXIT_INPUT


def test_invalid_tree_decomposition_exits_2(is_k3, write_instance, tmp_path):
    td = tmp_path / "bad.td"
    td.write_text("b 1 1 2\nb 2 3\ne 1 2\n")
    args = ["--out", str(tmp_path / "run"), "solve", str(write_instance(is_k3)), "--td", str(td)]
    assert run(args) == EXIT_INPUT


@pytest.mark.parametrize("bag", ["1 2 3 4", "0 1 2 3"])
def test_tree_decomposition_with_unknown_vertices_exits_2(is_k3, write_instance, tmp_path, bag):
    td = tmp_path / "extra.td"
    td.write_text(f"b 1 {bag}\n")
    args = ["--out", str(tmp_path / "run"), "solve", str(write_instance(is_k3)), "--td", str(td)]
    assert run(args) == EXIT_INPUT


def test_config_guard_exits_2(is_k3, write_instance, tmp_path):
    args = ["--out", str(tmp_path / "run"), "solve", str(write_instance(is_k3)), "--max-configs", "3"]
    assert run(args) == EXIT_INPUT


def test_supplied_tree_decomposition(is_k3, write_instance, tmp_path):
    td = tmp_path / "k3.td"
    td.write_text("b 1 1 2 3\n")
    out = tmp_path / "run"
    assert run(["--out", str(out), "solve", str(write_instance(is_k3)), "--td", str(td)]) == EXIT_OK
    assert _json(out, "report.json")["td_width"] == 2


def test_emit_lp(is_k3, write_instance, tmp_path):
    target = tmp_path / "model.lp"
    out = tmp_path / "run"
    assert run(["--out", str(out), "emit-lp", str(write_instance(is_k3)), str(target)]) == EXIT_OK
    text = target.read_text()
    assert text == _artifact(out, "model.lp").read_text()
    assert "\\ stats: variables=12 constraints=14" in text
    assert text.splitlines()[-1] == "end"


def test_reduce_then_solve(tmp_path):
    graph = tmp_path / "k3.graph"
    graph.write_text(format_graph(complete_graph(3)))
    instance = tmp_path / "maxcut.json"
    out = tmp_path / "run"
    code = run(["--out", str(out), "reduce", "maxcut", str(graph), "--output", str(instance)])
    assert code == EXIT_OK
    assert len(json.loads(instance.read_text())["soft"]) == 3
    assert _json(out, "recovery.json")["problem"] == "maxcut"
    assert run(["--out", str(tmp_path / "solved"), "solve", str(instance)]) == EXIT_OK
    assert _json(tmp_path / "solved", "report.json")["optimum"] == "2"


def test_reduce_oct_domains(tmp_path):
    graph = tmp_path / "c5.graph"
    graph.write_text(format_graph(cycle_graph(5)))
    out = tmp_path / "run"
    assert run(["--out", str(out), "reduce", "oct", str(graph)]) == EXIT_OK
    assert _json(out, "instance.json")["domains"] == [[0, 1, 2]] * 5


def test_unknown_problem_exits_2(tmp_path):
    graph = tmp_path / "k3.graph"
    graph.write_text(format_graph(complete_graph(3)))
    assert run(["--out", str(tmp_path / "run"), "reduce", "knapsack", str(graph)]) == EXIT_INPUT


def test_verify_nothing_to_do(tmp_path):
    assert run(["--out", str(tmp_path / "run"), "verify", "--seeds", "0"]) == EXIT_OK


def test_verify_instance_and_fault_injection(is_k3, write_instance, tmp_path):
    path = str(write_instance(is_k3))
    assert run(["--out", str(tmp_path / "a"), "verify", path, "--seeds", "0"]) == EXIT_OK
    code = run(["--out", str(tmp_path / "b"), "verify", path, "--seeds", "0", "--inject-fault"])
    assert code == EXIT_FAILURE


def test_verify_seeds_and_points(tmp_path):
    out = tmp_path / "run"
    assert run(["--out", str(out), "verify", "--seeds", "5", "--seed", "11", "--points", "3"]) == EXIT_OK
    rows = _artifact(out, "verify.csv").read_text().splitlines()
    assert len(rows) == 6
    assert len(_artifact(out, "points.csv").read_text().splitlines()) == 4


def test_oracle_and_td_commands(is_k3, write_instance, tmp_path):
    path = str(write_instance(is_k3))
    out = tmp_path / "oracle"
    assert run(["--out", str(out), "oracle", path]) == EXIT_OK
    results = _json(out, "oracle.json")
    assert results["brute_force"]["optimum"] == results["treewidth_dp"]["optimum"] == "1"
    out = tmp_path / "td"
    assert run(["--out", str(out), "td", path]) == EXIT_OK
    assert _artifact(out, "nice.td").read_text().startswith("c nice width 2")


def test_runs_resume_in_an_existing_folder(is_k3, write_instance, tmp_path):
    out = tmp_path / "run"
    path = str(write_instance(is_k3))
    assert run(["--out", str(out), "td", path]) == EXIT_OK
    assert run(["--out", str(out), "oracle", path]) == EXIT_OK
    assert _artifact(out, "oracle.json").name == "03_oracle.json"


def test_corrupted_manifest_exits_2(is_k3, write_instance, tmp_path):
    out = tmp_path / "run"
    out.mkdir()
    (out / ".extform_run.json").write_text("{ broken")
    assert run(["--out", str(out), "td", str(write_instance(is_k3))]) == EXIT_INPUT


def test_out_pointing_at_a_file_exits_2(is_k3, write_instance, tmp_path):
    path = str(write_instance(is_k3))
    assert run(["--out", path, "td", path]) == EXIT_INPUT


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out
