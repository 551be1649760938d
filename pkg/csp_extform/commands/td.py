"""Check a tree decomposition (or build one) and write its nice form."""

from __future__ import annotations

import argparse
from collections import Counter

from csp_extform.commands import load_inputs
from csp_extform.config import EXIT_FAILURE, EXIT_OK, Settings
from csp_extform.display import show_saved, show_status, show_summary
from csp_extform.pipeline import decompose
from csp_extform.session import RunSession
from csp_extform.treedec import format_nice_td, format_td, make_nice

NAME = "td"
HELP = "Validate or build a tree decomposition and write the nice form"


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="instance JSON file")
    parser.add_argument("--td", help="tree decomposition file to validate")
    parser.add_argument("--root", type=int, help="TD node to root the nice form at")


def run(args: argparse.Namespace, session: RunSession, settings: Settings) -> int:
    show_status("Tree decomposition", args.td or args.input)
    instance, td = load_inputs(args.input, args.td)
    td, ntd = decompose(instance, td)
    if args.root is not None:
        ntd = make_nice(td, root=args.root)
    problems = ntd.check()
    kinds = Counter(node.kind.value for node in ntd.nodes.values())
    session.logger.log(
        "Nice decomposition",
        f"width {ntd.width()}, {len(ntd)} nodes, "
        + ", ".join(f"{k}={kinds[k]}" for k in sorted(kinds)),
    )

    show_saved(session.save_text("td.td", format_td(td)))
    show_saved(session.save_text("nice.td", format_nice_td(ntd)))
    show_summary(
        "Decomposition",
        {
            "width": td.width(),
            "bags": td.node_count,
            "nice nodes": len(ntd),
            "roots": len(ntd.roots),
            **{f"{k} nodes": kinds[k] for k in sorted(kinds)},
            "nice invariants": "ok" if not problems else "; ".join(problems),
        },
        ok=not problems,
    )
    return EXIT_OK if not problems else EXIT_FAILURE
