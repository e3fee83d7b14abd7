"""
==============================================================================
ESTIMATE - ShiftRobust subcommand
==============================================================================
Run the frequency-witness tournament on a samples CSV and emit the
EstimateReport as JSON.

Usage:
    python manage.py estimate --config est.json --samples data.csv
    python manage.py estimate --config est.json --samples data.csv --trace --out report.json

Config:
    {"version": 1,
     "dist": {"kind": "gaussian", "d": 1},
     "estimator": {"epsilon": 0.5, "alpha": 0.1, ...}}

Author: ShiftRobust Development Team
==============================================================================
"""

from contamination.datasets import read_dataset
from core.commands import ShiftRobustCommand
from estimator.forms import config_from_payload
from estimator.tournament import estimate


class Command(ShiftRobustCommand):
    help = 'Estimate the clean mean from contaminated samples'
    accepts_dist = True

    def add_command_arguments(self, parser):
        parser.add_argument('--samples', required=True, help='Samples CSV (see the sample subcommand)')
        parser.add_argument(
            '--trace',
            action='store_true',
            help='Include every candidate and its score in the report'
        )
        parser.add_argument(
            '--no-precenter',
            action='store_true',
            help='Center the candidate cover at the origin instead of the median'
        )

    def handle(self, *args, **options):
        config = self.read_config(options, required=True)
        dist = self.distribution(options, config)
        estimator_config = config_from_payload(config.get('estimator', {}), dist)
        samples, _ = read_dataset(options['samples'])

        report = estimate(
            estimator_config, samples, dist,
            precentering=not options['no_precenter'],
            clean_seed=options['seed'],
        )
        for warning in report.warnings:
            self.stderr.write(self.style.WARNING(warning))
        self.emit_json(report.to_json(trace=options['trace']), options)
