"""Cross-check the formulation against the oracles on an instance and on random seeds."""

from __future__ import annotations

import argparse

import pandas as pd

from csp_extform.config import EXIT_FAILURE, EXIT_OK, Settings
from csp_extform.display import console, preview_df, show_saved, show_status, show_summary
from csp_extform.instance import load_instance
from csp_extform.session import RunSession
from csp_extform.suite import check_instance, check_point_decomposition, run_suite

NAME = "verify"
HELP = "Three-way oracle agreement and vertex-integrality checks"


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", nargs="?", help="instance JSON file to check as well")
    parser.add_argument("--seeds", type=int, default=200, help="number of random instances (default 200)")
    parser.add_argument("--seed", type=int, help="first seed (default: $EXTFORM_SEED or 0)")
    parser.add_argument("--points", type=int, default=0, help="random fractional points to decompose")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for the random suite")
    parser.add_argument("--cap", type=int, help="brute-force assignment cap")
    parser.add_argument(
        "--inject-fault", action="store_true",
        help="solve the base relaxation in place of P(Q); the checks must fail",
    )


def run(args: argparse.Namespace, session: RunSession, settings: Settings) -> int:
    show_status("Verify", args.input or f"{args.seeds} random seeds")
    if args.seeds < 0 or args.points < 0:
        raise ValueError("--seeds and --points must be non-negative")

    reports = []
    if args.input:
        instance = load_instance(args.input)
        reports.append(check_instance(instance, args.input, settings, args.inject_fault))
        session.logger.log("Checked instance", args.input)
    if args.seeds:
        seeds = range(settings.seed, settings.seed + args.seeds)
        with console.status(f"Checking {args.seeds} seeds..."):
            reports.extend(run_suite(seeds, settings, args.jobs, args.inject_fault))
        session.logger.log("Checked random suite", f"seeds {seeds.start}..{seeds.stop - 1}, {args.jobs} job(s)")

    point_reports = [check_point_decomposition(s, settings) for s in range(settings.seed, settings.seed + args.points)]
    if point_reports:
        session.logger.log("Decomposed points", f"{len(point_reports)} random fractional points")

    if not reports and not point_reports:
        console.print("[yellow]Nothing to verify.[/yellow]")
        return EXIT_OK

    failures = 0
    if reports:
        df = pd.DataFrame([r.as_row() for r in reports])
        show_saved(session.save_frame(df, "verify.csv"))
        failed = df[~df["ok"]]
        failures += len(failed)
        if len(failed):
            preview_df(failed, title="Failed cases")
    if point_reports:
        points_df = pd.DataFrame([vars(r) | {"ok": r.ok} for r in point_reports])
        show_saved(session.save_frame(points_df, "points.csv"))
        failures += int((~points_df["ok"]).sum())

    session.logger.log("Verification finished", f"{failures} failure(s)")
    show_summary(
        "Verification",
        {
            "cases": len(reports),
            "points": len(point_reports),
            "failures": failures,
            "fault injected": args.inject_fault,
        },
        ok=failures == 0,
    )
    return EXIT_OK if failures == 0 else EXIT_FAILURE
