"""Miscellaneous commands: init, verify."""

import sys
from pathlib import Path

import click
import humanize
from click import echo, option, style
from rich.console import Console
from rich.table import Table

from ..config import CONFIG_FILE, AffpermConfig, save_config
from ..verify import LEVELS, run_suites, selected_suites
from .utils import progress_bar, seed_option, stderr_console


@click.command()
def init():
    """Write a default .affperm.yaml in the current directory.

    \b
    Examples:
      affperm init
      AFFPERM_CAP=8 affperm total -n 8 -m brute   # env overrides the file
    """
    path = Path.cwd() / CONFIG_FILE
    if path.exists():
        echo(f"Already initialized: {path}")
        return
    save_config(AffpermConfig(), path)
    echo(f"Initialized: {path}")


@click.command()
@option('-l', '--level', type=click.Choice(LEVELS), default="quick", show_default=True)
@seed_option
def verify(level: str, seed: int):
    """Run the self-verification suites; exit 0 iff all pass.

    \b
    Examples:
      affperm verify                # quick level, under a minute
      affperm verify -l full        # full grids, several minutes
    """
    suites = selected_suites(level)
    results = []
    with progress_bar(stderr_console(), f"verify ({level})") as progress:
        task = progress.add_task("", total=len(suites))
        for suite in suites:
            progress.update(task, description=suite.name)
            results.extend(run_suites(level, seed, [suite]))
            progress.advance(task)

    table = Table(title=f"verify ({level})")
    table.add_column("suite")
    table.add_column("status")
    table.add_column("time", justify="right")
    table.add_column("detail")
    for r in results:
        status = "[green]PASS[/]" if r.passed else "[red]FAIL[/]"
        table.add_row(r.name, status, humanize.naturaldelta(r.elapsed, minimum_unit="milliseconds"), r.detail)
    Console().print(table)

    failed = [r.name for r in results if not r.passed]
    if failed:
        echo(style(f"{len(failed)} of {len(results)} suites failed: {', '.join(failed)}", fg="red"))
        sys.exit(1)
    echo(style(f"All {len(results)} suites passed", fg="green"))
