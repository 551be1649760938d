"""Run the brute-force and treewidth-DP oracles on an instance."""

from __future__ import annotations

import argparse

from csp_extform.commands import load_inputs
from csp_extform.config import EXIT_FAILURE, EXIT_INFEASIBLE, EXIT_OK, Settings
from csp_extform.display import show_saved, show_status, show_summary
from csp_extform.oracles import OracleResult, brute_force, treewidth_dp
from csp_extform.pipeline import decompose
from csp_extform.rational import format_rational
from csp_extform.session import RunSession

NAME = "oracle"
HELP = "Solve an instance by brute force and by the treewidth DP"


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="instance JSON file")
    parser.add_argument("--td", help="tree decomposition file for the DP")
    parser.add_argument("--method", choices=("brute", "dp", "both"), default="both")
    parser.add_argument("--cap", type=int, help="brute-force assignment cap")


def _as_json(result: OracleResult) -> dict[str, object]:
    return {
        "status": result.status.value,
        "optimum": format_rational(result.optimum) if result.optimum is not None else None,
        "witness": list(result.witness) if result.witness is not None else None,
        "count": result.count,
    }


def run(args: argparse.Namespace, session: RunSession, settings: Settings) -> int:
    show_status("Oracle", args.input)
    instance, td = load_inputs(args.input, args.td)
    results: dict[str, OracleResult] = {}
    if args.method in ("brute", "both"):
        results["brute_force"] = brute_force(instance, settings.brute_force_cap)
    if args.method in ("dp", "both"):
        _, ntd = decompose(instance, td)
        results["treewidth_dp"] = treewidth_dp(instance, ntd)

    payload = {name: _as_json(r) for name, r in results.items()}
    for name, data in payload.items():
        session.logger.log(f"Oracle {name}", f"{data['status']} optimum={data['optimum']} witness={data['witness']}")
    show_saved(session.save_json("oracle.json", payload))

    outcomes = {(r.status, r.optimum) for r in results.values()}
    fields = {}
    for name, data in payload.items():
        fields[name] = f"{data['status']}  optimum {data['optimum']}  witness {data['witness']}"
    show_summary("Oracles", fields, ok=len(outcomes) == 1)
    if len(outcomes) != 1:
        return EXIT_FAILURE
    if not next(iter(results.values())).feasible:
        return EXIT_INFEASIBLE
    return EXIT_OK
