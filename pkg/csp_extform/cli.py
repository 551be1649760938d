"""Main CLI entry point for csp-extform."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from types import ModuleType

from rich.panel import Panel

from csp_extform import __version__
from csp_extform.config import EXIT_FAILURE, EXIT_INPUT, Settings
from csp_extform.display import console, show_error
from csp_extform.errors import SolverError
from csp_extform.logger import setup_logging
from csp_extform.session import RunSession

COMMANDS: list[ModuleType] = []


def _register_commands() -> None:
    """Lazily import and register command modules."""
    if COMMANDS:
        return
    from csp_extform.commands import emit_lp, oracle, reduce, solve, td, verify

    COMMANDS.extend([solve, emit_lp, verify, reduce, oracle, td])


def build_parser() -> argparse.ArgumentParser:
    _register_commands()
    parser = argparse.ArgumentParser(
        prog="csp-extform",
        description="Extended LP formulations of bounded-treewidth CSPs, solved exactly.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="show debug logging")
    parser.add_argument("--out", help="run folder (default: <input>_extform_<timestamp>)")
    sub = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        p = sub.add_parser(module.NAME, help=module.HELP, description=module.HELP)
        module.add_arguments(p)
        p.set_defaults(handler=module)
    return parser


def _open_session(args: argparse.Namespace) -> RunSession:
    if args.out and RunSession.is_run_dir(args.out):
        return RunSession.from_output_dir(args.out, args.command)
    if args.out and Path(args.out).is_file():
        raise ValueError(f"'{args.out}' is a file, not a run folder")
    return RunSession(getattr(args, "input", None), args.command, args.out)


def _settings(args: argparse.Namespace) -> Settings:
    return Settings.from_env().override(
        max_configs=getattr(args, "max_configs", None),
        brute_force_cap=getattr(args, "cap", None),
        seed=getattr(args, "seed", None),
    )


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    args = build_parser().parse_args(argv)
    setup_logging(console, args.verbose)
    console.print(
        Panel(
            f"[bold magenta]csp-extform[/bold magenta]  -  {args.command}",
            expand=False,
        )
    )
    try:
        settings = _settings(args)
        session = _open_session(args)
        code = args.handler.run(args, session, settings)
    except json.JSONDecodeError:
        show_error(f"Run manifest in '{args.out}' is corrupted (invalid JSON).")
        return EXIT_INPUT
    except SolverError as e:
        show_error(str(e))
        return EXIT_FAILURE
    except (FileNotFoundError, ValueError) as e:
        show_error(str(e))
        return EXIT_INPUT

    console.print(
        Panel(f"[bold green]Done![/bold green]  Output saved to:\n  {session.output_dir}", expand=False)
    )
    return code


def main() -> None:
    sys.exit(run())
