"""
==============================================================================
TREND - ShiftRobust subcommand
==============================================================================
For every epsilon of a sweep, find the smallest n on a doubling ladder with
success rate >= 2/3, then fit log n against (alpha/eps)^2 or log(1/eps).

Usage:
    python manage.py trend --config trend.json --out trend.json
    python manage.py trend --config harness/configs/trend_gaussian.json --seed 7

--seed, when given, replaces master_seed from the config.

Config: a sweep document (see bench) with a "trend" section:
    "trend": {"axis": "alpha_over_eps_squared" | "log_inv_eps", "n_start": 64, "n_max": 1048576}

Author: ShiftRobust Development Team
==============================================================================
"""

from core.commands import ShiftRobustCommand
from harness.forms import sweep_from_payload, trend_options_from_payload
from harness.sweeps import run_trend


class Command(ShiftRobustCommand):
    help = 'Minimal-n sweep with a log-n trend fit'
    seed_default = None

    def handle(self, *args, **options):
        document = self.read_config(options, required=True)
        trend = trend_options_from_payload(document.get('trend'))
        sweep = sweep_from_payload({
            k: v for k, v in document.items() if k not in ('version', 'trend')
        } | {'n': 'auto'} | self.seed_override(options))

        result = run_trend(sweep, axis=trend['axis'], n_start=trend['n_start'], n_max=trend.get('n_max'))
        for point in result['points']:
            if point['minimal_n'] is not None:
                self.stderr.write(self.style.NOTICE(f"eps={point['epsilon']:g}: minimal n = {point['minimal_n']}"))
                continue
            detail = f": {point['stop_detail']}" if point['stop_detail'] else ''
            self.stderr.write(self.style.WARNING(
                f"eps={point['epsilon']:g}: not reached ({point['stop_reason']}, n_max={point['n_max']}){detail}"
            ))
        if result['fit'] is None:
            self.stderr.write(self.style.WARNING('Fewer than two epsilons reached 2/3 success; no fit'))
        self.emit_json(result, options)
