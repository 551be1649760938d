"""Run logger: records every pipeline stage with timestamps, plus console log setup."""

from __future__ import annotations

import logging
from datetime import datetime
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler

LOG_NAME = "run_log.txt"


class RunLogger:
    """Appends stage records to ``run_log.txt`` in the run folder."""

    def __init__(self, output_dir: Path, command: str = "", append: bool = False) -> None:
        self.log_path = output_dir / LOG_NAME
        stamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        if append and self.log_path.exists():
            with open(self.log_path, "a") as f:
                f.write("\n" + "-" * 60 + "\n")
                f.write("Run Resumed\n")
                f.write(f"Resumed: {stamp}\n")
                f.write("-" * 60 + "\n\n")
        else:
            with open(self.log_path, "w") as f:
                f.write("=" * 60 + "\n")
                f.write(f"csp-extform Run Log{f' ({command})' if command else ''}\n")
                f.write(f"Started: {stamp}\n")
                f.write("=" * 60 + "\n\n")

    def log(self, action: str, details: str = "") -> None:
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        with open(self.log_path, "a") as f:
            f.write(f"[{timestamp}] {action}\n")
            if details:
                f.write(f"  {details}\n")
            f.write("\n")


def setup_logging(console: Console, verbose: bool = False) -> None:
    """Route library loggers through rich; DEBUG records show only with ``verbose``."""
    handler = RichHandler(console=console, show_path=False, markup=False)
    root = logging.getLogger("csp_extform")
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)
    root.propagate = False
