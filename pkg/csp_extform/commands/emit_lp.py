"""Export the base relaxation or P(Q) as a CPLEX-LP file."""

from __future__ import annotations

import argparse
from pathlib import Path

from csp_extform.commands import load_inputs
from csp_extform.config import EXIT_OK, Settings
from csp_extform.display import show_saved, show_status, show_summary
from csp_extform.extform import build_base_lp, build_extended_lp, formulation_stats
from csp_extform.lpwriter import write_lp
from csp_extform.pipeline import decompose
from csp_extform.session import RunSession

NAME = "emit-lp"
HELP = "Write the base LP or the extended formulation in CPLEX-LP format"


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="instance JSON file")
    parser.add_argument("output", nargs="?", help="LP file to write (also saved in the run folder)")
    parser.add_argument("--td", help="tree decomposition file (default: min-fill heuristic)")
    kind = parser.add_mutually_exclusive_group()
    kind.add_argument("--base", action="store_true", help="emit the base relaxation")
    kind.add_argument("--extended", action="store_true", help="emit P(Q) (default)")
    parser.add_argument("--max-configs", type=int, help="abort when P(Q) needs more f-variables")


def run(args: argparse.Namespace, session: RunSession, settings: Settings) -> int:
    show_status("Emit LP", args.input)
    instance, td = load_inputs(args.input, args.td)
    if args.base:
        model = build_base_lp(instance)
    else:
        _, ntd = decompose(instance, td)
        model = build_extended_lp(instance, ntd, settings.max_configs)
    stats = formulation_stats(model)
    header = {k: stats.as_row()[k] for k in ("variables", "constraints", "nonzeros")}
    text = write_lp(model.lp, header)
    session.logger.log("Generated LP", f"{model.lp.name}: " + ", ".join(f"{k}={v}" for k, v in header.items()))

    show_saved(session.save_text("model.lp", text))
    if args.output:
        out = Path(args.output)
        out.write_text(text)
        show_saved(out)
        session.logger.log("Exported LP", str(out))
    show_summary("LP", {"formulation": model.lp.name, **header, "within bounds": stats.within_bounds})
    return EXIT_OK
