"""Encode a graph problem as a CSP instance JSON plus a recovery sidecar."""

from __future__ import annotations

import argparse
from pathlib import Path

from csp_extform.config import EXIT_OK, Settings
from csp_extform.display import show_saved, show_status, show_summary
from csp_extform.instance import dump_instance, instance_to_dict
from csp_extform.reductions import PROBLEMS, read_graph, reduce
from csp_extform.session import RunSession

NAME = "reduce"
HELP = f"Reduce a graph problem to CSP ({', '.join(PROBLEMS)})"


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("problem", help="problem name")
    parser.add_argument("input", help="graph file (p/e lines, with t/pi/l/h extensions)")
    parser.add_argument("--k", type=int, help="colours for coloring, labels for unique-games")
    parser.add_argument("--output", help="instance JSON to write (also saved in the run folder)")


def run(args: argparse.Namespace, session: RunSession, settings: Settings) -> int:
    show_status(f"Reduce {args.problem}", args.input)
    graph = read_graph(args.input)
    out = reduce(args.problem, graph, args.k)
    data = instance_to_dict(out.instance)
    sidecar = {
        "problem": out.problem,
        "projection": out.projection,
        "claimed_size": out.claimed_size,
        "sense": out.instance.sense.value,
        "graph": str(Path(args.input).resolve()),
        "k": args.k,
    }
    session.logger.log(
        "Reduced",
        f"{out.problem}: n={out.instance.n} hard={len(out.instance.hard)} soft={len(out.instance.soft)}",
    )
    show_saved(session.save_json("instance.json", data))
    show_saved(session.save_json("recovery.json", sidecar))
    if args.output:
        show_saved(dump_instance(out.instance, args.output))
    show_summary("Reduction", sidecar | {"variables": out.instance.n, "soft": len(out.instance.soft)})
    return EXIT_OK
