"""Pattern checks and the Ψ encoder/decoder."""

import click
from click import echo, option

from ..core import is_bounded, perm_from_json, perm_to_json
from ..decomposition import psi, psi_inverse, tuple_from_json, tuple_to_json
from ..patterns import contains_affine
from .utils import AliasGroup, err, handle_errors, parse_pattern_option, read_json, write_json

input_option = option('-i', '--input', 'input_path', type=click.Path(exists=True, dir_okay=False), required=True)
out_option = option('-o', '--out', type=click.Path(dir_okay=False), help="Write JSON here instead of stdout")


@click.command()
@option('-P', '--perm', 'perm_path', type=click.Path(exists=True, dir_okay=False), required=True,
        help='Permutation JSON: {"size": N, "window": [...]}')
@option('-p', '--pattern', callback=parse_pattern_option, required=True, help="Pattern, e.g. 321")
@handle_errors
def check(perm_path: str, pattern):
    """Check whether a bounded affine permutation contains a pattern.

    Prints CONTAINS with the witness positions of a minimal-span
    occurrence, or AVOIDS. Exit code is 0 either way.

    \b
    Examples:
      affperm check -P perm.json -p 321     # CONTAINS 5 6 9
      affperm check -P perm.json -p 4321
    """
    sigma = perm_from_json(read_json(perm_path))
    found = contains_affine(sigma, pattern)
    if found is None:
        echo("AVOIDS")
    else:
        echo("CONTAINS " + " ".join(str(i) for i in found.positions))


@click.group("psi", cls=AliasGroup, aliases={'e': 'encode', 'd': 'decode'})
def psi_group():
    """Encode decomposition tuples and decode avoiders."""


@psi_group.command()
@input_option
@out_option
@handle_errors
def encode(input_path: str, out: str | None):
    """Map a tuple (n, G, H, Δ) to its affine permutation.

    \b
    Examples:
      affperm psi encode -i tuple.json
      affperm psi encode -i tuple.json -o perm.json
    """
    sigma = psi(tuple_from_json(read_json(input_path)))
    if not is_bounded(sigma):
        err(f"warning: {sigma} is not bounded")
    write_json(perm_to_json(sigma), out)


@psi_group.command()
@input_option
@option('-k', '--k', type=click.IntRange(min=1), required=True, help="Number of blocks")
@out_option
@handle_errors
def decode(input_path: str, k: int, out: str | None):
    """Recover the canonical tuple of a bounded (k+1)...1-avoider.

    \b
    Examples:
      affperm psi decode -i perm.json -k 2
    """
    t = psi_inverse(perm_from_json(read_json(input_path)), k)
    write_json(tuple_to_json(t), out)
