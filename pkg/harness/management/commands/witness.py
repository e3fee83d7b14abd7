"""
==============================================================================
WITNESS - ShiftRobust subcommand
==============================================================================
Find a frequency omega with |sin(pi omega.v)| >= A and |phi_D(omega)| >= delta.

Usage:
    python manage.py witness --dist gaussian --v 0.5 --A 0.4 --delta 0.2
    python manage.py witness --config witness.json   # {"dist", "v", "A", "delta"}

Author: ShiftRobust Development Team
==============================================================================
"""

from core.commands import ShiftRobustCommand
from core.numerics import as_vector
from spectral.witness import find_witness, witness_norm_bound


class Command(ShiftRobustCommand):
    help = 'Search for a frequency witness of the shift v'
    accepts_seed = False
    accepts_dist = True

    def add_command_arguments(self, parser):
        parser.add_argument('--v', help='Shift vector, comma-separated')
        parser.add_argument('--A', type=float, help='Sine threshold in (0, 1]')
        parser.add_argument('--delta', type=float, help='CF threshold in (0, 1]')

    def handle(self, *args, **options):
        config = self.read_config(options)
        dist = self.distribution(options, config)
        raw_v = self.option(options, config, 'v')
        if isinstance(raw_v, str):
            raw_v = [float(part) for part in raw_v.split(',')]
        v = as_vector(raw_v, dist.dimension)
        A = float(self.option(options, config, 'A'))
        delta = float(self.option(options, config, 'delta'))

        result = find_witness(dist, v, A, delta)
        payload = result.to_json()
        payload['found'] = result.found
        payload['norm_bound'] = witness_norm_bound(dist.constants.deriv_l1_M1, delta, dist.dimension)
        if not result.found:
            self.stderr.write(self.style.WARNING('No witness found'))
        self.emit_json(payload, options)
