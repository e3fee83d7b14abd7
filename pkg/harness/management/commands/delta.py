"""
==============================================================================
DELTA - ShiftRobust subcommand
==============================================================================
Evaluate delta(eps, alpha, D): the smallest, over directions, of the largest
|phi_D(omega)| at a frequency with dist(eps omega.v, Z) >= alpha.
Prints the achieving (v, omega, value).

Usage:
    python manage.py delta --dist gaussian --epsilon 0.5 --alpha 0.1

Author: ShiftRobust Development Team
==============================================================================
"""

from core.commands import ShiftRobustCommand
from spectral.hardness import delta_quantity


class Command(ShiftRobustCommand):
    help = 'Evaluate the hardness quantity delta(eps, alpha, D)'
    accepts_seed = False
    accepts_dist = True

    def add_command_arguments(self, parser):
        parser.add_argument('--epsilon', type=float)
        parser.add_argument('--alpha', type=float)
        parser.add_argument('--omega-max', type=float, help='Scan range (default: automatic)')

    def handle(self, *args, **options):
        config = self.read_config(options)
        dist = self.distribution(options, config)
        epsilon = float(self.option(options, config, 'epsilon'))
        alpha = float(self.option(options, config, 'alpha'))
        omega_max = self.option(options, config, 'omega_max', required=False)

        result = delta_quantity(dist, epsilon, alpha, omega_max=omega_max)
        if result.empty_feasible_set:
            self.stderr.write(self.style.WARNING('No frequency satisfies the distance constraint'))
        self.emit_json(result.to_json(), options)
