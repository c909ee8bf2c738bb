"""Shared CLI utilities and helpers."""

import json
import math
import sys
from fractions import Fraction
from functools import wraps
from pathlib import Path

import click
from rich.console import Console
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
)

from ..core import OrdinaryPermutation, decreasing, parse_pattern
from ..counting import AsymptoticEstimate
from ..errors import AffpermError


def err(*args, **kwargs):
    """Print to stderr."""
    print(*args, file=sys.stderr, **kwargs)


def handle_errors(f):
    """Report domain and input errors on stderr and exit 1."""
    @wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except AffpermError as e:
            err(f"error: {e}")
            sys.exit(1)
        except json.JSONDecodeError as e:
            err(f"error: format: invalid JSON: {e}")
            sys.exit(1)
        except OSError as e:
            err(f"error: {e}")
            sys.exit(1)
        except ValueError as e:
            err(f"error: {e}")
            sys.exit(1)
    return wrapper


def read_json(path: str) -> object:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def write_json(data: object, path: str | None) -> None:
    """Write to path, or to stdout when path is None."""
    text = json.dumps(data, indent=2)
    if path is None:
        click.echo(text)
    else:
        Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")


# =============================================================================
# Formatting
# =============================================================================


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_float(x: float) -> str:
    return f"{x:.12g}"


def format_estimate(estimate: AsymptoticEstimate) -> str:
    """12 significant digits; values beyond double range via their log10."""
    value = estimate.value
    if math.isfinite(value):
        return format_float(value)
    exponent = math.floor(estimate.log10)
    mantissa = 10 ** (estimate.log10 - exponent)
    return f"{mantissa:.12g}e+{exponent}"


# =============================================================================
# Option callbacks
# =============================================================================


def parse_int_list(ctx, param, value):
    """Parse '4,8,16' into a list of ints."""
    if value is None:
        return None
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")


def parse_pattern_option(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_pattern(value)
    except AffpermError as e:
        raise click.BadParameter(str(e))


def resolve_pattern(k: int | None, pattern: OrdinaryPermutation | None) -> OrdinaryPermutation:
    """--k K means the decreasing pattern (K+1)...1; exactly one of --k/--pattern is allowed."""
    if (k is None) == (pattern is None):
        raise click.UsageError("give exactly one of --k or --pattern")
    if k is not None:
        if k < 1:
            raise click.BadParameter("must be >= 1", param_hint="--k")
        return decreasing(k + 1)
    return pattern


k_option = click.option('-k', '--k', type=int, help="Avoid the decreasing pattern (k+1)...1")
pattern_option = click.option(
    '-p', '--pattern', callback=parse_pattern_option,
    help="Pattern in one-line notation, e.g. 321 or 10,9,...,1",
)
seed_option = click.option('-s', '--seed', type=click.IntRange(min=0), default=0, show_default=True,
                           help="Random seed")


def stderr_console() -> Console:
    return Console(stderr=True)


def progress_bar(console: Console, label: str) -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn(f"[bold blue]{label}"),
        BarColumn(),
        TaskProgressColumn(),
        TextColumn("{task.description}"),
        TimeElapsedColumn(),
        console=console,
    )


class AliasGroup(click.Group):
    """Click Group that supports command aliases."""

    def __init__(self, *args, aliases: dict[str, str] | None = None, **kwargs):
        super().__init__(*args, **kwargs)
        self.aliases = aliases or {}
        # Build reverse mapping: command -> list of aliases
        self._cmd_aliases: dict[str, list[str]] = {}
        for alias, cmd in self.aliases.items():
            self._cmd_aliases.setdefault(cmd, []).append(alias)

    def get_command(self, ctx, cmd_name):
        cmd_name = self.aliases.get(cmd_name, cmd_name)
        return super().get_command(ctx, cmd_name)

    def resolve_command(self, ctx, args):
        _, cmd_name, args = super().resolve_command(ctx, args)
        cmd_name = self.aliases.get(cmd_name, cmd_name)
        return _, cmd_name, args

    def format_commands(self, ctx, formatter):
        """Write all commands with their aliases to the formatter."""
        commands = []
        for subcommand in self.list_commands(ctx):
            cmd = self.get_command(ctx, subcommand)
            if cmd is None or cmd.hidden:
                continue
            aliases = self._cmd_aliases.get(subcommand, [])
            if aliases:
                name = f"{subcommand} ({', '.join(sorted(aliases))})"
            else:
                name = subcommand
            help_text = cmd.get_short_help_str(limit=formatter.width)
            commands.append((name, help_text))

        if commands:
            with formatter.section("Commands"):
                formatter.write_dl(commands)
