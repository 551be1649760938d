"""Shared console helpers used by the CLI and the command modules."""

from __future__ import annotations

from typing import Mapping

import pandas as pd
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

console = Console()


def show_status(label: str, detail: str) -> None:
    """A small status bar naming the command and its input."""
    console.print(
        Panel(f"[bold cyan]{label}:[/bold cyan] {detail}", style="dim", expand=False)
    )
    console.print()


def show_error(message: str) -> None:
    console.print(f"[bold red]Error:[/bold red] {message}")


def show_summary(title: str, fields: Mapping[str, object], ok: bool = True) -> None:
    """Key/value panel; green border for success, red otherwise."""
    body = "\n".join(f"[bold]{k}:[/bold] {v}" for k, v in fields.items())
    console.print(
        Panel(body, title=f"[bold]{title}[/bold]", border_style="green" if ok else "red", expand=False)
    )


def preview_df(df: pd.DataFrame, title: str = "Preview", max_rows: int = 10) -> None:
    """Show a quick rich table preview of the DataFrame."""
    table = Table(title=title, show_lines=True)
    for col in df.columns:
        table.add_column(str(col), overflow="fold")
    for _, row in df.head(max_rows).iterrows():
        table.add_row(*[str(v) for v in row])
    if len(df) > max_rows:
        table.add_row(*["..." for _ in df.columns])
    console.print(table)
    console.print(f"[dim]{len(df)} rows total[/dim]\n")


def show_saved(path: object) -> None:
    console.print(f"[green]Saved:[/green] {path}")
