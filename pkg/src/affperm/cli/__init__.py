"""CLI package for affperm.

Commands are organized into modules:
- counting_cmds.py: total, avoiders, z, zstar, growth
- check.py: check, psi encode/decode
- sample.py: sample, converge
- misc.py: init, verify
- utils.py: Shared utilities and helpers
"""

import click
from dotenv import load_dotenv

from .utils import AliasGroup

from .check import check, psi_group
from .counting_cmds import avoiders, growth, total, z, zstar
from .misc import init, verify
from .sample import converge, sample


@click.group(cls=AliasGroup, aliases={
    'a': 'avoiders',
    'c': 'check',
    'cv': 'converge',
    'g': 'growth',
    's': 'sample',
    't': 'total',
    'v': 'verify',
})
def main():
    """Bounded affine permutations avoiding decreasing patterns."""
    load_dotenv()


main.add_command(avoiders)
main.add_command(check)
main.add_command(converge)
main.add_command(growth)
main.add_command(init)
main.add_command(psi_group)
main.add_command(sample)
main.add_command(total)
main.add_command(verify)
main.add_command(z)
main.add_command(zstar)


__all__ = [
    'main',
    'avoiders',
    'check',
    'converge',
    'growth',
    'init',
    'psi_group',
    'sample',
    'total',
    'verify',
    'z',
    'zstar',
]
