"""
==============================================================================
BAND-L2 - ShiftRobust subcommand
==============================================================================
L2 norm of phi_D restricted to {omega : dist(eps omega, Z) > halfwidth}.

Usage:
    python manage.py band-l2 --dist gaussian --epsilon 0.1 --halfwidth 0.05

Author: ShiftRobust Development Team
==============================================================================
"""

from core.commands import ShiftRobustCommand
from spectral.hardness import band_l2_mass


class Command(ShiftRobustCommand):
    help = 'L2 mass of the characteristic function outside the lattice bands'
    accepts_seed = False
    accepts_dist = True

    def add_command_arguments(self, parser):
        parser.add_argument('--epsilon', type=float)
        parser.add_argument('--halfwidth', type=float, help='Band half-width in eps-scaled units (c alpha)')
        parser.add_argument('--omega-max', type=float)
        parser.add_argument('--quad-step', type=float)

    def handle(self, *args, **options):
        config = self.read_config(options)
        dist = self.distribution(options, config)
        epsilon = float(self.option(options, config, 'epsilon'))
        halfwidth = float(self.option(options, config, 'halfwidth'))
        value = band_l2_mass(
            dist, epsilon, halfwidth,
            omega_max=self.option(options, config, 'omega_max', required=False),
            quad_step=self.option(options, config, 'quad_step', required=False),
        )
        self.emit_json({
            'dist': dist.to_json(),
            'epsilon': epsilon,
            'halfwidth': halfwidth,
            'band_l2': value,
        }, options)
