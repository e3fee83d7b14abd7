"""
==============================================================================
CF - ShiftRobust subcommand
==============================================================================
Print the characteristic function of a base distribution, one line per
frequency, formatted as <re><+/-im>i.

Usage:
    python manage.py cf --dist gaussian --omega 0
    python manage.py cf --dist laplace --d 2 --omega 0.1,0.2 --omega 0,1
    python manage.py cf --config cf.json        # {"version": 1, "dist": {...}, "omega": [...]}

Author: ShiftRobust Development Team
==============================================================================
"""

from core.commands import ShiftRobustCommand
from core.exceptions import ArgumentError
from core.jsonio import format_complex
from core.numerics import as_points


def parse_frequencies(raw, d):
    """Flag strings ("0.1,0.2") or config values (numbers / lists) as a (k, d) batch."""
    rows = []
    for item in raw:
        if isinstance(item, str):
            try:
                rows.append([float(part) for part in item.split(',')])
            except ValueError as exc:
                raise ArgumentError(f'Bad frequency {item!r}: {exc}') from exc
        elif isinstance(item, (int, float)):
            rows.append([float(item)])
        else:
            rows.append([float(part) for part in item])
    return as_points(rows, d)


class Command(ShiftRobustCommand):
    help = 'Evaluate the characteristic function phi_D(omega)'
    accepts_seed = False
    accepts_dist = True

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--omega',
            action='append',
            help='Frequency (comma-separated components when d > 1); repeatable'
        )

    def handle(self, *args, **options):
        config = self.read_config(options)
        dist = self.distribution(options, config)
        raw = self.option(options, config, 'omega')
        if not isinstance(raw, list):
            raw = [raw]
        values = dist.cf(parse_frequencies(raw, dist.dimension))
        self.emit_text('\n'.join(format_complex(value) for value in values), options)
