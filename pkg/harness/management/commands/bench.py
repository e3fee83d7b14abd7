"""
==============================================================================
BENCH - ShiftRobust subcommand
==============================================================================
Run a benchmark sweep and emit one record per trial.

Usage:
    python manage.py bench --config sweep.json --out results.csv
    python manage.py bench --config sweep.json --out results.json --save

Records go to --out (CSV or JSON by extension, or --format), else to stdout
as CSV. --seed, when given, replaces master_seed from the config. --save
also stores the run in the database. Per-cell success rates
are reported on stderr.

Author: ShiftRobust Development Team
==============================================================================
"""

from django.db import transaction

from core.commands import ShiftRobustCommand
from harness.emit import RecordFormat, emit_records, records_to_text
from harness.forms import sweep_from_payload
from harness.models import BenchmarkRecord, BenchmarkRun
from harness.sweeps import run_benchmark, success_rates


class Command(ShiftRobustCommand):
    help = 'Run a benchmark sweep of the estimator'
    seed_default = None

    def add_command_arguments(self, parser):
        parser.add_argument('--format', choices=RecordFormat.choices, help='Record format (default: from --out)')
        parser.add_argument('--save', action='store_true', help='Store the run and its records in the database')
        parser.add_argument('--jobs', type=int, help='Worker processes (default: BENCH_N_JOBS)')

    def handle(self, *args, **options):
        document = self.read_config(options, required=True)
        sweep = sweep_from_payload(
            {k: v for k, v in document.items() if k != 'version'} | self.seed_override(options)
        )

        records = run_benchmark(sweep, n_jobs=options.get('jobs'))

        for row in success_rates(records).itertuples(index=False):
            self.stderr.write(self.style.NOTICE(
                f'eps={row.epsilon:g} n={row.n}: {row.success_rate:.3f} over {row.trials} trials'
            ))
        skipped = [r for r in records if r.skipped]
        for record in skipped:
            self.stderr.write(self.style.WARNING(f'skipped eps={record.epsilon:g}: {record.skip_reason}'))

        if options['save']:
            self.save(document, sweep, records)

        out = options.get('out') or sweep.out
        if out:
            emit_records(records, out, options.get('format'))
            self.stderr.write(self.style.SUCCESS(f'Wrote {len(records)} records to {out}'))
        else:
            self.stdout.write(records_to_text(records, options.get('format') or RecordFormat.CSV), ending='')

    @transaction.atomic
    def save(self, document, sweep, records):
        run = BenchmarkRun.objects.create(
            config=document,
            master_seed=sweep.master_seed,
            record_count=len(records),
        )
        for record in records:
            record.run = run
        BenchmarkRecord.objects.bulk_create(records)
        self.stderr.write(self.style.SUCCESS(f'Saved {run}'))
