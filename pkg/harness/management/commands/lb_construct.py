"""
==============================================================================
LB-CONSTRUCT - ShiftRobust subcommand
==============================================================================
Build the Fourier-matching pair and emit it as JSON (atoms of g, Q0, Q1,
m, c, w, truncation K and tail bound).

Usage:
    python manage.py lb-construct --dist gaussian --epsilon 0.2 --alpha 0.3
    python manage.py lb-construct --dist laplace --epsilon 0.2 --alpha 0.3 --c 0.2 --no-atoms

Infeasible c (bands overlap or l1_norm(g) > 2) exits with code 2 and names
the largest feasible c.

Author: ShiftRobust Development Team
==============================================================================
"""

from harness.management.commands._lowerbound import HardInstanceCommand


class Command(HardInstanceCommand):
    help = 'Construct the lower-bound hard instance'

    def add_command_arguments(self, parser):
        super().add_command_arguments(parser)
        parser.add_argument(
            '--no-atoms',
            action='store_true',
            help='Only emit the summary numbers, not the atom lists'
        )

    def handle(self, *args, **options):
        instance = self.build(options)
        self.stderr.write(self.style.SUCCESS(
            f'c={instance.c:.6g} w={instance.w:.6g} m={instance.m:.6g} '
            f'K={instance.g.truncation_K} atoms={len(instance.g)}'
        ))
        self.emit_json(instance.to_json(include_atoms=not options['no_atoms']), options)
