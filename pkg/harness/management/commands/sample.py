"""
==============================================================================
SAMPLE - ShiftRobust subcommand
==============================================================================
Draw a contaminated dataset and write it as CSV (one sample per line, with
the seed and model JSON in the '#' header).

Usage:
    python manage.py sample --config model.json --n 1000 --seed 7 --out data.csv

Config:
    {"version": 1,
     "model": {"alpha": 0.1, "mu": [0.3], "adversary": {...}, "base": {...}}}

A config holding only "dist" (or the --dist flag) draws clean samples at mu = 0.

Author: ShiftRobust Development Team
==============================================================================
"""

from django.core.management.base import CommandError

from contamination.datasets import write_dataset
from contamination.forms import model_from_payload
from contamination.sampling import draw_contaminated, null_model
from core.commands import ShiftRobustCommand


class Command(ShiftRobustCommand):
    help = 'Draw n contaminated samples to a CSV dataset'
    accepts_dist = True

    def add_command_arguments(self, parser):
        parser.add_argument('--n', type=int, help='Number of samples')

    def handle(self, *args, **options):
        config = self.read_config(options)
        if 'model' in config and not options.get('dist'):
            model = model_from_payload(config['model'])
        else:
            dist = self.distribution(options, config)
            model = null_model(dist, [0.0] * dist.dimension)
        n = int(self.option(options, config, 'n'))
        out = self.option(options, config, 'out')

        samples = draw_contaminated(model, options['seed'], n)
        try:
            write_dataset(out, samples, seed=options['seed'], model=model)
        except OSError as exc:
            raise CommandError(str(exc), returncode=1) from exc
        self.stderr.write(self.style.SUCCESS(f'Wrote {n} samples to {out}'))
