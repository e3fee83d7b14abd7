"""
==============================================================================
HARNESS APP - COMMAND-LINE DISPATCH
==============================================================================
`manage.py <subcommand> ...` entry point for the ShiftRobust subcommands.

Subcommand names use hyphens on the command line (band-l2, lb-construct)
and map onto management commands with underscores.

Exit codes:
    0  success
    1  usage error (unknown subcommand, bad flags, invalid config)
    2  infeasible construction or resource cap

Author: ShiftRobust Development Team
==============================================================================
"""

import sys

from django.core.management import call_command
from django.core.management.base import CommandError

SUBCOMMANDS = {
    'cf': 'Evaluate the characteristic function of a base distribution',
    'sample': 'Draw a contaminated dataset to CSV',
    'estimate': 'Run the frequency-witness tournament on a samples CSV',
    'witness': 'Find a frequency witness for a shift v',
    'delta': 'Evaluate the hardness quantity delta(eps, alpha, D)',
    'band-l2': 'L2 mass of phi_D outside the lattice bands',
    'lb-construct': 'Build the Fourier-matching hard instance',
    'lb-tv': 'TV distance (direct and Fourier bound) of the hard instance',
    'bench': 'Run a benchmark sweep and emit records',
    'trend': 'Minimal-n sweep and log-n trend fit',
    'verify-claims': 'Check the population statistic bounds on random instances',
}


def command_name(subcommand):
    return subcommand.replace('-', '_')


def usage():
    width = max(len(name) for name in SUBCOMMANDS)
    lines = ['usage: manage.py <subcommand> [--config PATH] [--seed U64] [--out PATH] ...', '', 'subcommands:']
    lines += [f'  {name.ljust(width)}  {text}' for name, text in SUBCOMMANDS.items()]
    return '\n'.join(lines) + '\n'


def cli_dispatch(argv, *, stdout=None, stderr=None):
    """
    Run one subcommand and return its exit code.

    Args:
        argv: [subcommand, *flags]
        stdout, stderr: streams (default: sys.stdout / sys.stderr)
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if not argv or argv[0] not in SUBCOMMANDS:
        if argv:
            stderr.write(f'Unknown subcommand: {argv[0]}\n')
        stderr.write(usage())
        return 1
    try:
        call_command(command_name(argv[0]), *argv[1:], stdout=stdout, stderr=stderr)
    except CommandError as exc:
        stderr.write(f'Error: {exc}\n')
        return exc.returncode
    except SystemExit as exc:
        # --help exits through argparse
        return exc.code if isinstance(exc.code, int) else 1
    return 0
