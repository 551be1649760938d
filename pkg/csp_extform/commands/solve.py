"""Solve an instance through its extended formulation and recover a witness."""

from __future__ import annotations

import argparse
import time

import pandas as pd

from csp_extform.commands import RunReport, instance_summary, load_inputs, stats_json
from csp_extform.config import EXIT_FAILURE, EXIT_INFEASIBLE, EXIT_OK, Settings
from csp_extform.display import preview_df, show_saved, show_status, show_summary
from csp_extform.extform import formulation_stats
from csp_extform.instance import objective_value
from csp_extform.oracles import brute_force, treewidth_dp
from csp_extform.pipeline import PipelineResult, solve_instance
from csp_extform.ratlp import SolveStatus, check_optimality
from csp_extform.rational import format_rational
from csp_extform.session import RunSession
from csp_extform.treedec import format_nice_td

NAME = "solve"
HELP = "Solve an instance JSON exactly via P(Q) and report the witness"


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="instance JSON file")
    parser.add_argument("--td", help="tree decomposition file (default: min-fill heuristic)")
    kind = parser.add_mutually_exclusive_group()
    kind.add_argument("--base", action="store_true", help="solve the base relaxation instead")
    kind.add_argument("--extended", action="store_true", help="solve P(Q) (default)")
    parser.add_argument("--max-configs", type=int, help="abort when P(Q) needs more f-variables")
    parser.add_argument("--dump-tableau", action="store_true", help="save the final simplex tableau")
    parser.add_argument("--check", action="store_true", help="compare against both oracles")


def _oracle_flags(result: PipelineResult, settings: Settings) -> dict[str, bool]:
    lp = result.optimum if result.solution.optimal else None
    brute = brute_force(result.instance, settings.brute_force_cap)
    dp = treewidth_dp(result.instance, result.ntd)
    return {
        "brute_force": (brute.optimum if brute.feasible else None) == lp,
        "treewidth_dp": (dp.optimum if dp.feasible else None) == lp,
        "certificate": not check_optimality(result.solution) if result.solution.optimal else True,
    }


def build_report(result: PipelineResult, wall_time: float, oracles: dict[str, bool] | None = None) -> RunReport:
    return RunReport(
        instance=instance_summary(result.instance),
        td_width=result.ntd.width(),
        td_nodes=len(result.ntd),
        formulation=result.model.lp.name,
        stats=stats_json(formulation_stats(result.model)),
        status=result.status.value,
        optimum=format_rational(result.optimum) if result.optimum is not None else None,
        integral=result.integral,
        oracles=oracles or {},
        wall_time=wall_time,
    )


def run(args: argparse.Namespace, session: RunSession, settings: Settings) -> int:
    show_status("Solve", args.input)
    instance, td = load_inputs(args.input, args.td)
    session.logger.log(
        "Validated instance",
        f"n={instance.n} D={instance.max_domain_size} hard={len(instance.hard)} soft={len(instance.soft)}",
    )

    start = time.perf_counter()
    result = solve_instance(instance, td, settings, base=args.base, dump_tableau=args.dump_tableau)
    wall_time = time.perf_counter() - start
    session.logger.log(
        "Decomposed",
        f"{'supplied' if td else 'min-fill'} TD width {result.td.width()}, nice forest {len(result.ntd)} nodes",
    )
    session.logger.log(
        "Solved",
        f"{result.model.lp.name} LP: {result.status.value} after {result.solution.pivots} pivots",
    )
    show_saved(session.save_text("nice.td", format_nice_td(result.ntd)))

    stats = formulation_stats(result.model)
    stats_df = pd.DataFrame([stats.as_row()])
    preview_df(stats_df, title="Formulation")
    show_saved(session.save_frame(stats_df, "stats.csv"))

    oracles = _oracle_flags(result, settings) if args.check else None
    report = build_report(result, wall_time, oracles)
    show_saved(session.save_json("report.json", report.to_json()))
    if result.solution.tableau is not None:
        show_saved(session.save_text("tableau.txt", result.solution.tableau))

    if result.witness is not None:
        witness = {
            "z": list(result.witness.z),
            "h": {str(k): v for k, v in result.witness.h_by_id.items()},
            "objective": format_rational(objective_value(instance, result.witness.z)),
        }
        show_saved(session.save_json("witness.json", witness))
        session.logger.log("Projected witness", f"z={list(result.witness.z)}")

    ok = result.status is SolveStatus.OPTIMAL and (args.base or bool(result.integral))
    ok = ok and all((oracles or {}).values())
    show_summary(
        "Result",
        {
            "status": report.status,
            "optimum": report.optimum,
            "integral": report.integral,
            "witness": list(result.witness.z) if result.witness else "-",
            "wall time": f"{wall_time:.3f}s",
            **{f"agrees with {k}": v for k, v in report.oracles.items()},
        },
        ok=ok or result.status is SolveStatus.INFEASIBLE,
    )

    if result.status is SolveStatus.INFEASIBLE:
        return EXIT_INFEASIBLE
    if not ok:
        session.logger.log("Check failed", "non-integral vertex or oracle disagreement")
        return EXIT_FAILURE
    return EXIT_OK
