"""Counting commands: total, avoiders, z, zstar, growth."""

import click
from click import echo, option

from ..config import load_config
from ..counting import (
    asymptotic_avoiders,
    asymptotic_total,
    brute_avoiders,
    brute_total,
    exact_total,
    growth_rate_diagnostic,
    upper_bound_avoiders,
    z_count,
    z_star,
)
from .utils import (
    format_estimate,
    format_float,
    format_fraction,
    handle_errors,
    k_option,
    parse_int_list,
    pattern_option,
    resolve_pattern,
)


def _workers(workers: int | None) -> int:
    return load_config().workers if workers is None else workers


workers_option = option('-w', '--workers', type=click.IntRange(min=1), help="Worker processes for enumeration")


@click.command()
@option('-n', '--n', 'n', type=click.IntRange(min=1), required=True, help="Size N")
@option('-m', '--method', type=click.Choice(["formula", "brute", "asymptotic"]), default="formula",
        show_default=True)
@workers_option
@handle_errors
def total(n: int, method: str, workers: int | None):
    """Count all bounded affine permutations of size N.

    \b
    Examples:
      affperm total -n 6                  # Exact Eulerian-number formula
      affperm total -n 5 -m brute         # Exhaustive enumeration
      affperm total -n 500 -m asymptotic  # Leading-order estimate
    """
    if method == "formula":
        echo(exact_total(n))
    elif method == "brute":
        echo(brute_total(n, workers=_workers(workers)))
    else:
        echo(format_estimate(asymptotic_total(n)))


@click.command()
@option('-n', '--n', 'n', type=click.IntRange(min=1), required=True, help="Size N")
@k_option
@pattern_option
@option('-m', '--method', type=click.Choice(["brute", "upper-bound", "asymptotic"]), default="brute",
        show_default=True)
@workers_option
@handle_errors
def avoiders(n: int, k: int | None, pattern, method: str, workers: int | None):
    """Count bounded affine permutations of size N avoiding a pattern.

    The upper-bound and asymptotic methods need a decreasing pattern.

    \b
    Examples:
      affperm avoiders -n 5 -k 2                    # Avoiders of 321, by enumeration
      affperm avoiders -n 5 -p 2143                 # Any pattern works for brute
      affperm avoiders -n 40 -k 2 -m upper-bound
      affperm avoiders -n 500 -k 3 -m asymptotic
    """
    tau = resolve_pattern(k, pattern)
    if method == "brute":
        echo(brute_avoiders(n, tau, workers=_workers(workers)))
        return
    if not tau.is_decreasing or tau.size < 2:
        raise click.BadParameter(f"{method} needs a decreasing pattern of size >= 2", param_hint="--pattern")
    blocks = tau.size - 1
    if method == "upper-bound":
        echo(upper_bound_avoiders(blocks, n))
    else:
        echo(format_estimate(asymptotic_avoiders(blocks, n)))


@click.command()
@option('-P', '--parts', callback=parse_int_list, required=True, help="Comma-separated n_1,...,n_k")
@handle_errors
def z(parts: list[int]):
    """Count integer vectors with |Δ_i| <= n_i summing to zero.

    \b
    Examples:
      affperm z -P 3,4,5
    """
    echo(z_count(parts))


@click.command()
@k_option
@handle_errors
def zstar(k: int | None):
    """Print the limit constant Z*_k as an exact rational.

    \b
    Examples:
      affperm zstar -k 4    # 16/3
    """
    if k is None:
        raise click.UsageError("missing option --k")
    echo(format_fraction(z_star(k)))


@click.command()
@k_option
@pattern_option
@option('-S', '--sizes', callback=parse_int_list, required=True, help="Comma-separated sizes")
@workers_option
@handle_errors
def growth(k: int | None, pattern, sizes: list[int], workers: int | None):
    """Print count^(1/N) per size; a diagnostic, not a limit.

    \b
    Examples:
      affperm growth -k 2 -S 2,3,4,5,6
    """
    tau = resolve_pattern(k, pattern)
    rates = growth_rate_diagnostic(tau, sizes, workers=_workers(workers))
    for n, rate in zip(sizes, rates):
        echo(f"{n}\t{format_float(rate)}")
