"""
==============================================================================
VERIFY-CLAIMS - ShiftRobust subcommand
==============================================================================
Check the population bounds on the test statistic (no sampling):

    |T| >= 2(1 - alpha) A - alpha             at a frequency witness
    |T| <= 2(1 - alpha) pi |omega| |v| + alpha at random frequencies

over random point-shift instances. Exits 1 when any check fails.

Usage:
    python manage.py verify-claims --seed 0 --instances 20 --frequencies 100

Author: ShiftRobust Development Team
==============================================================================
"""

import math

from django.core.management.base import CommandError

from core.commands import ShiftRobustCommand
from estimator.claims import verify_claims


class Command(ShiftRobustCommand):
    help = 'Verify the population test-statistic bounds on random instances'
    accepts_config = False

    def add_command_arguments(self, parser):
        parser.add_argument('--instances', type=int, default=20)
        parser.add_argument('--frequencies', type=int, default=100)

    def handle(self, *args, **options):
        summary = verify_claims(
            seed=options['seed'],
            instances=options['instances'],
            frequencies=options['frequencies'],
        )
        for key in ('large_T', 'small_T'):
            if math.isinf(summary[key]['min_slack']):
                summary[key]['min_slack'] = None
        self.emit_json(summary, options)

        failed = summary['large_T']['failed'] + summary['small_T']['failed']
        if failed:
            raise CommandError(f'{failed} claim checks failed', returncode=1)
