import io
import json
import math
import tempfile
from dataclasses import replace
from pathlib import Path
from unittest import mock

from django.core.exceptions import ValidationError
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings

from contamination.adversaries import PointShift
from core.exceptions import ArgumentError, ResourceError
from distributions.base import BaseDistribution
from harness.cli import cli_dispatch
from harness.emit import emit_records, parse_records, records_to_text
from harness.forms import sweep_from_payload, trend_options_from_payload
from harness.models import BenchmarkRecord, BenchmarkRun
from estimator.tournament import estimate
from harness.sweeps import (
    StopReason, SweepConfig, TrendAxis, find_minimal_n, fit_trend, run_benchmark, run_cell, run_trend,
    success_rates, trial_seed,
)

GAUSSIAN = BaseDistribution.gaussian(1)
UNIFORM = BaseDistribution.uniform()

CONFIG_DIR = Path(__file__).resolve().parent / 'configs'

SWEEP_DOCUMENT = {
    'version': 1,
    'dist': {'kind': 'gaussian', 'd': 1},
    'adversary': {'kind': 'point_shift', 'z': [5.0]},
    'alpha': 0.1,
    'mu': [0.3],
    'epsilons': [0.5],
    'n': [2000],
    'trials': 3,
    'master_seed': 11,
}


def small_sweep(**changes):
    fields = dict(
        dist=GAUSSIAN, adversary=PointShift([5.0]), alpha=0.1, mu=(0.3,),
        epsilons=(0.5,), n_values=(2000,), trials=3, master_seed=11,
    )
    fields.update(changes)
    return SweepConfig(**fields)


def make_record(**changes):
    fields = dict(
        dist='gaussian', d=1, alpha=0.1, epsilon=0.5, n=1000, seed=3, success=True,
        runtime_ms=1.25, score=0.123456789012345678, adversary='{"kind":"point_shift","z":[5.0]}',
    )
    fields.update(changes)
    return BenchmarkRecord(**fields)


def run_cli(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    code = cli_dispatch(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


def write_config(directory, payload, name='config.json'):
    path = Path(directory) / name
    path.write_text(json.dumps({'version': 1, **payload}), encoding='utf-8')
    return str(path)


class EmitRecordsTests(SimpleTestCase):

    def test_empty_records_give_header_only(self):
        text = records_to_text([])
        self.assertEqual(text, 'dist,d,alpha,epsilon,n,seed,success,runtime_ms,score,adversary\n')

    def test_three_records_four_lines(self):
        records = [make_record(seed=s) for s in (1, 2, 3)]
        self.assertEqual(len(records_to_text(records).splitlines()), 4)

    def test_csv_round_trip_is_exact(self):
        records = [
            make_record(),
            make_record(seed=2**64 - 1, success=False, score=None, runtime_ms=0.0),
            make_record(alpha=1 / 3, epsilon=0.1 + 0.2, n=10**7),
        ]
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'records.csv'
            emit_records(records, path)
            parsed = parse_records(path)
        self.assertEqual([r.as_row() for r in parsed], [r.as_row() for r in records])

    def test_json_round_trip_keeps_skip_reason(self):
        records = [make_record(), make_record(skipped=True, skip_reason='cover too large', score=None)]
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'records.json'
            emit_records(records, path)
            payload = json.loads(path.read_text())
            parsed = parse_records(path)
        self.assertIsInstance(payload, list)
        self.assertEqual(payload[1]['skip_reason'], 'cover too large')
        self.assertEqual([r.as_row() for r in parsed], [r.as_row() for r in records])
        self.assertTrue(parsed[1].skipped)

    def test_write_failure_names_path(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'missing' / 'records.csv'
            with self.assertRaises(CommandError) as ctx:
                emit_records([make_record()], path)
        self.assertIn(str(path), str(ctx.exception))

    def test_missing_records_file(self):
        with self.assertRaises(CommandError):
            parse_records('/nonexistent/records.csv')


class SweepTests(SimpleTestCase):

    def test_seed_sequence(self):
        self.assertEqual([trial_seed(5, t) for t in range(3)], [5, 6, 7])
        self.assertEqual(trial_seed(2**64 - 1, 1), 0)

    @override_settings(SHIFTROBUST={'DETERMINISTIC_RUNTIME': True})
    def test_records_are_deterministic_and_sorted(self):
        sweep = small_sweep(epsilons=(0.5, 0.45), n_values=(1000, 500))
        first = [r.as_row() for r in run_benchmark(sweep)]
        second = [r.as_row() for r in run_benchmark(sweep)]
        self.assertEqual(first, second)
        self.assertEqual(len(first), 2 * 2 * 3)
        keys = [(r['epsilon'], r['n'], r['seed']) for r in first]
        self.assertEqual(keys, sorted(keys))
        self.assertTrue(all(r['runtime_ms'] == 0.0 for r in first))

    def test_cell_order_does_not_matter(self):
        forward = run_benchmark(small_sweep(epsilons=(0.5, 0.45)))
        backward = run_benchmark(small_sweep(epsilons=(0.45, 0.5)))
        strip = lambda records: [{**r.as_row(), 'runtime_ms': 0} for r in records]
        self.assertEqual(strip(forward), strip(backward))

    def test_success_rate_in_unit_interval(self):
        rates = success_rates(run_benchmark(small_sweep()))
        self.assertEqual(len(rates), 1)
        self.assertTrue(0.0 <= rates['success_rate'].iloc[0] <= 1.0)
        self.assertEqual(rates['trials'].iloc[0], 3)

    @override_settings(SHIFTROBUST={'COVER_SIZE_CAP': 5})
    def test_infeasible_cell_is_skipped(self):
        records = run_benchmark(small_sweep())
        self.assertEqual(len(records), 1)
        self.assertTrue(records[0].skipped)
        self.assertIn('cover', records[0].skip_reason)
        self.assertFalse(records[0].success)

    def test_alpha_outside_sine_range_is_skipped(self):
        records = run_benchmark(small_sweep(alpha=0.45))
        self.assertTrue(records[0].skipped)

    def test_auto_n_meets_guarantee(self):
        sweep = small_sweep(n_values='auto', trials=30, master_seed=0)
        records = run_benchmark(sweep)
        self.assertEqual(len(records), 30)
        self.assertTrue(130_000 < records[0].n < 140_000, records[0].n)
        self.assertFalse(any(r.skipped for r in records))
        successes = sum(r.success for r in records)
        self.assertGreaterEqual(successes / 30, 2 / 3)

    def test_minimal_n_reaches_target(self):
        cell = small_sweep().cell(0.5)
        search = find_minimal_n(cell, 6, 0, n_start=256, n_max=2**17)
        self.assertEqual(search.stop_reason, StopReason.REACHED)
        n = search.n
        self.assertIsNotNone(n)
        self.assertEqual(search.ladder[-1][0], n)
        self.assertGreaterEqual(search.ladder[-1][1], 2 / 3)
        self.assertEqual(n & (n - 1), 0)
        rows = run_cell(replace(cell, n=n), 6, 0)
        self.assertGreaterEqual(sum(r['success'] for r in rows) / 6, 2 / 3)

    @override_settings(SHIFTROBUST={'AUTO_N_CAP': 1024})
    def test_minimal_n_search_stops_at_cap(self):
        search = find_minimal_n(small_sweep().cell(0.5), 3, 0, n_start=64, n_max=2**30)
        self.assertEqual(search.n_max, 1024)
        self.assertTrue(all(n <= 1024 for n, _ in search.ladder))
        self.assertIn(search.stop_reason, (StopReason.REACHED, StopReason.N_MAX))
        if search.stop_reason == StopReason.N_MAX:
            self.assertIsNone(search.n)
            self.assertEqual([n for n, _ in search.ladder], [64, 128, 256, 512, 1024])

    @override_settings(SHIFTROBUST={'COVER_SIZE_CAP': 5})
    def test_minimal_n_search_reports_skip(self):
        search = find_minimal_n(small_sweep().cell(0.5), 3, 0)
        self.assertEqual(search.stop_reason, StopReason.SKIPPED)
        self.assertIsNone(search.n)
        self.assertEqual(search.ladder, ())
        self.assertIn('cover', search.detail)

    def test_failing_trial_keeps_the_others(self):
        calls = []

        def flaky_estimate(*args, **kwargs):
            calls.append(None)
            if len(calls) == 2:
                raise ResourceError('score matrix too large', required=10**9)
            return estimate(*args, **kwargs)

        with mock.patch('harness.sweeps.estimate', side_effect=flaky_estimate):
            rows = run_cell(small_sweep().cell(0.5, 2000), 3, 11)
        self.assertEqual([row['seed'] for row in rows], [11, 12, 13])
        self.assertEqual([row['skipped'] for row in rows], [False, True, False])
        self.assertIn('score matrix', rows[1]['skip_reason'])
        self.assertEqual(rows[1]['n'], 2000)
        self.assertFalse(rows[1]['success'])

    def test_default_runtime_is_zero(self):
        records = run_benchmark(small_sweep())
        self.assertTrue(all(r.runtime_ms == 0.0 for r in records))

    @override_settings(SHIFTROBUST={'DETERMINISTIC_RUNTIME': False})
    def test_runtime_recorded_when_not_deterministic(self):
        records = run_benchmark(small_sweep())
        self.assertTrue(all(r.runtime_ms > 0.0 for r in records))

    def test_empty_sweep_rejected(self):
        with self.assertRaises(ArgumentError):
            small_sweep(epsilons=())
        with self.assertRaises(ArgumentError):
            small_sweep(trials=0)


class DeskTrendTests(SimpleTestCase):
    """Reduced-scale trends on the desk preset; AUTO_N_CAP bounds every search."""

    def test_gaussian_minimal_n_grows(self):
        sweep = small_sweep(
            alpha=0.3, epsilons=(0.8, 0.7, 0.6), n_values='auto', trials=6, master_seed=0, preset='desk',
        )
        result = run_trend(sweep, axis=TrendAxis.ALPHA_OVER_EPS_SQUARED, n_start=64, n_max=2**19)
        minimal = [p['minimal_n'] for p in result['points']]
        self.assertTrue(all(n is not None for n in minimal), result['points'])
        self.assertTrue(all(p['stop_reason'] == StopReason.REACHED for p in result['points']))
        self.assertEqual(result['preset'], 'desk')
        self.assertIsNotNone(result['fit'])
        self.assertGreater(result['fit']['slope'], 0)

    def test_uniform_minimal_n_grows(self):
        sweep = small_sweep(
            dist=UNIFORM, alpha=0.1, epsilons=(0.4, 0.1), n_values='auto', trials=6, master_seed=0,
            preset='desk',
        )
        result = run_trend(sweep, axis=TrendAxis.LOG_INV_EPS, n_start=64, n_max=2**21)
        minimal = [p['minimal_n'] for p in result['points']]
        self.assertTrue(all(n is not None for n in minimal), result['points'])
        self.assertGreater(minimal[1], minimal[0])
        self.assertGreater(result['fit']['slope'], 0)

    def test_shipped_configs_validate(self):
        for name in ('trend_gaussian.json', 'trend_uniform.json'):
            document = json.loads((CONFIG_DIR / name).read_text(encoding='utf-8'))
            trend = trend_options_from_payload(document.pop('trend'))
            document.pop('version')
            sweep = sweep_from_payload({**document, 'n': 'auto'})
            self.assertEqual(sweep.preset, 'desk', msg=name)
            self.assertIn(trend['axis'], dict(TrendAxis.choices))
            for cell in sweep.cells():
                self.assertGreater(cell.config().delta, 1e-2, msg=(name, cell.epsilon))


class TrendFitTests(SimpleTestCase):

    def test_exact_line(self):
        fit = fit_trend([0.0, 1.0, 2.0, 3.0], [1.0, 3.0, 5.0, 7.0])
        self.assertAlmostEqual(fit.slope, 2.0)
        self.assertAlmostEqual(fit.intercept, 1.0)
        self.assertAlmostEqual(fit.r2, 1.0)

    def test_noisy_line(self):
        fit = fit_trend([1, 2, 3, 4], [math.log(100), math.log(400), math.log(1500), math.log(7000)])
        self.assertGreater(fit.slope, 0)
        self.assertGreater(fit.r2, 0.9)

    def test_needs_two_points(self):
        with self.assertRaises(ArgumentError):
            fit_trend([1.0], [2.0])


class SweepFormTests(SimpleTestCase):

    def payload(self, **changes):
        document = {k: v for k, v in SWEEP_DOCUMENT.items() if k != 'version'}
        document.update(changes)
        return document

    def test_valid_document(self):
        sweep = sweep_from_payload(self.payload(estimator={'candidate_resolution': 0.05}))
        self.assertEqual(sweep.epsilons, (0.5,))
        self.assertEqual(sweep.n_values, (2000,))
        self.assertEqual(sweep.estimator, {'candidate_resolution': 0.05})
        self.assertEqual(sweep.master_seed, 11)

    def test_auto_n(self):
        self.assertTrue(sweep_from_payload(self.payload(n='auto')).auto_n)

    def test_preset(self):
        self.assertEqual(sweep_from_payload(self.payload()).preset, 'theory')
        sweep = sweep_from_payload(self.payload(alpha=0.3, preset='desk'))
        self.assertEqual(sweep.cell(0.5).config().candidate_resolution, 0.5 / 8)

    def test_rejections(self):
        for changes in (
            {'alpha': 0.5},
            {'epsilons': []},
            {'epsilons': [1.5]},
            {'n': 'many'},
            {'n': [0]},
            {'trials': 0},
            {'mu': [0.0, 1.0]},
            {'estimator': {'colour': 'red'}},
            {'master_seed': -1},
            {'preset': 'fast'},
        ):
            with self.assertRaises(ValidationError, msg=changes):
                sweep_from_payload(self.payload(**changes))

    def test_trend_section(self):
        options = trend_options_from_payload({'axis': 'log_inv_eps'})
        self.assertEqual(options['n_start'], 64)
        with self.assertRaises(ValidationError):
            trend_options_from_payload({'axis': 'linear'})
        with self.assertRaises(ValidationError):
            trend_options_from_payload({'axis': 'log_inv_eps', 'n_start': 100, 'n_max': 50})


class CliTests(SimpleTestCase):

    def test_cf_at_origin(self):
        code, out, _ = run_cli('cf', '--dist', 'gaussian', '--omega', '0')
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), '1+0i')

    def test_cf_multivariate(self):
        code, out, _ = run_cli('cf', '--dist', 'laplace', '--d', '2', '--omega', '0,0', '--omega', '0.1,0')
        self.assertEqual(code, 0)
        lines = out.strip().splitlines()
        self.assertEqual(lines[0], '1+0i')
        self.assertAlmostEqual(float(lines[1].split('+')[0]), 1 / (1 + 2 * math.pi ** 2 * 0.01), places=12)
        self.assertTrue(lines[1].endswith('+0i'))

    def test_cf_dimension_mismatch(self):
        code, _, err = run_cli('cf', '--dist', 'gaussian', '--d', '2', '--omega', '0')
        self.assertEqual(code, 1)
        self.assertIn('Error:', err)

    def test_unknown_subcommand(self):
        code, out, err = run_cli('frobnicate')
        self.assertEqual(code, 1)
        self.assertEqual(out, '')
        self.assertIn('usage:', err)
        self.assertIn('lb-construct', err)

    def test_no_subcommand(self):
        code, _, err = run_cli()
        self.assertEqual(code, 1)
        self.assertIn('usage:', err)

    def test_bad_flag_is_usage_error(self):
        code, _, _ = run_cli('delta', '--dist', 'gaussian', '--epsilon', 'abc')
        self.assertEqual(code, 1)

    def test_missing_config_file(self):
        code, _, err = run_cli('bench', '--config', '/nonexistent/sweep.json')
        self.assertEqual(code, 1)
        self.assertIn('not found', err)

    def test_wrong_config_version(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'sweep.json'
            path.write_text(json.dumps({**SWEEP_DOCUMENT, 'version': 2}))
            code, _, _ = run_cli('bench', '--config', str(path))
        self.assertEqual(code, 1)

    def test_lb_construct_infeasible_exit_code(self):
        code, _, err = run_cli(
            'lb-construct', '--dist', 'gaussian', '--epsilon', '0.2', '--alpha', '0.3', '--c', '0.8',
        )
        self.assertEqual(code, 2)
        self.assertIn('largest feasible c', err)

    def test_lb_construct_is_byte_identical(self):
        argv = ('lb-construct', '--dist', 'gaussian', '--epsilon', '0.2', '--alpha', '0.3', '--no-atoms')
        first, second = run_cli(*argv), run_cli(*argv)
        self.assertEqual(first[0], 0)
        self.assertEqual(first[1], second[1])
        payload = json.loads(first[1])
        self.assertLessEqual(payload['g_l1_norm'], 2.0)

    def test_lb_tv(self):
        code, out, _ = run_cli('lb-tv', '--dist', 'gaussian', '--epsilon', '0.6', '--alpha', '0.3')
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertLessEqual(payload['tv_direct'], payload['tv_fourier_bound'])
        self.assertGreaterEqual(payload['sample_lower_bound'], 1)

    def test_delta_and_band_l2(self):
        code, out, _ = run_cli('delta', '--dist', 'gaussian', '--epsilon', '0.5', '--alpha', '0.1')
        self.assertEqual(code, 0)
        self.assertIn('value', json.loads(out))
        code, out, _ = run_cli('band-l2', '--dist', 'gaussian', '--epsilon', '0.1', '--halfwidth', '0.05')
        self.assertEqual(code, 0)
        self.assertGreater(json.loads(out)['band_l2'], 0.0)

    def test_witness(self):
        code, out, _ = run_cli('witness', '--dist', 'gaussian', '--v', '0.5', '--A', '0.4', '--delta', '0.2')
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertTrue(payload['found'])
        self.assertLessEqual(abs(payload['omega'][0]), payload['norm_bound'] + 1e-9)

    def test_sample_then_estimate(self):
        with tempfile.TemporaryDirectory() as tmp:
            model = write_config(tmp, {'model': {
                'alpha': 0.1, 'mu': [0.3], 'adversary': {'kind': 'point_shift', 'z': [5.0]},
                'base': {'kind': 'gaussian', 'd': 1},
            }}, 'model.json')
            data = str(Path(tmp) / 'data.csv')
            code, _, _ = run_cli('sample', '--config', model, '--n', '20000', '--seed', '4', '--out', data)
            self.assertEqual(code, 0)
            est = write_config(tmp, {
                'dist': {'kind': 'gaussian', 'd': 1},
                'estimator': {'epsilon': 0.5, 'alpha': 0.1},
            }, 'est.json')
            code, out, err = run_cli('estimate', '--config', est, '--samples', data, '--trace')
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertLessEqual(abs(report['mu_hat'][0] - 0.3), 0.5)
        self.assertEqual(len(report['trace']), report['candidate_count'])
        self.assertIn('below the sample budget', err)

    def test_bench_writes_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = write_config(tmp, {k: v for k, v in SWEEP_DOCUMENT.items() if k != 'version'})
            out = Path(tmp) / 'results.csv'
            code, _, _ = run_cli('bench', '--config', config, '--out', str(out))
            lines = out.read_text().splitlines()
        self.assertEqual(code, 0)
        self.assertEqual(lines[0], 'dist,d,alpha,epsilon,n,seed,success,runtime_ms,score,adversary')
        self.assertEqual(len(lines), 1 + SWEEP_DOCUMENT['trials'])

    def test_bench_output_is_byte_identical(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = write_config(tmp, {k: v for k, v in SWEEP_DOCUMENT.items() if k != 'version'})
            outputs = []
            for name in ('a.csv', 'b.csv'):
                out = Path(tmp) / name
                run_cli('bench', '--config', config, '--out', str(out))
                outputs.append(out.read_bytes())
        self.assertEqual(outputs[0], outputs[1])

    def test_bench_seed_flag_overrides_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = write_config(tmp, {k: v for k, v in SWEEP_DOCUMENT.items() if k != 'version'})
            code, out, _ = run_cli('bench', '--config', config, '--seed', '40')
            _, default_out, _ = run_cli('bench', '--config', config)
        self.assertEqual(code, 0)
        seeds = [int(line.split(',')[5]) for line in out.strip().splitlines()[1:]]
        self.assertEqual(seeds, [40, 41, 42])
        default_seeds = [int(line.split(',')[5]) for line in default_out.strip().splitlines()[1:]]
        self.assertEqual(default_seeds, [11, 12, 13])

    @override_settings(SHIFTROBUST={'AUTO_N_CAP': 512})
    def test_trend_reports_stop_reason(self):
        with tempfile.TemporaryDirectory() as tmp:
            document = {k: v for k, v in SWEEP_DOCUMENT.items() if k != 'version'}
            document.update(trend={'axis': 'log_inv_eps', 'n_start': 64, 'n_max': 2**20})
            config = write_config(tmp, document)
            code, out, err = run_cli('trend', '--config', config, '--seed', '5')
        self.assertEqual(code, 0)
        point = json.loads(out)['points'][0]
        self.assertEqual(point['n_max'], 512)
        self.assertIn(point['stop_reason'], (StopReason.REACHED, StopReason.N_MAX))
        self.assertTrue(all(step['n'] <= 512 for step in point['ladder']))
        if point['minimal_n'] is None:
            self.assertIn('not reached (n_max, n_max=512)', err)

    def test_trend_reports_points(self):
        with tempfile.TemporaryDirectory() as tmp:
            document = {k: v for k, v in SWEEP_DOCUMENT.items() if k != 'version'}
            document.update(epsilons=[0.5, 0.45], trend={'axis': 'log_inv_eps', 'n_start': 256, 'n_max': 1024})
            config = write_config(tmp, document)
            code, out, _ = run_cli('trend', '--config', config)
        self.assertEqual(code, 0)
        result = json.loads(out)
        self.assertEqual(result['axis'], 'log_inv_eps')
        self.assertEqual([p['epsilon'] for p in result['points']], [0.5, 0.45])
        self.assertAlmostEqual(result['points'][1]['x'], math.log(1 / 0.45))
        for point in result['points']:
            self.assertIn(point['minimal_n'], (None, 256, 512, 1024))

    def test_verify_claims(self):
        code, out, _ = run_cli('verify-claims', '--instances', '3', '--frequencies', '10')
        self.assertEqual(code, 0)
        summary = json.loads(out)
        self.assertEqual(summary['small_T']['checked'], 30)
        self.assertEqual(summary['small_T']['failed'], 0)


class SaveRunTests(TestCase):

    def test_bench_save_stores_records(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = write_config(tmp, {k: v for k, v in SWEEP_DOCUMENT.items() if k != 'version'})
            code, out, _ = run_cli('bench', '--config', config, '--save')
        self.assertEqual(code, 0)
        self.assertEqual(len(out.strip().splitlines()), 1 + SWEEP_DOCUMENT['trials'])
        run = BenchmarkRun.objects.get()
        self.assertEqual(run.record_count, SWEEP_DOCUMENT['trials'])
        self.assertEqual(run.records.count(), SWEEP_DOCUMENT['trials'])
        self.assertEqual(int(run.master_seed), 11)
        self.assertEqual(sorted(int(r.seed) for r in run.records.all()), [11, 12, 13])
        rate = run.success_rate()
        self.assertTrue(0.0 <= rate <= 1.0)

    def test_unsigned_seed_survives_database(self):
        run = BenchmarkRun.objects.create(config={}, master_seed=2**64 - 1)
        record = make_record(seed=2**64 - 1, run=run)
        record.save()
        record.refresh_from_db()
        self.assertEqual(int(record.seed), 2**64 - 1)
        self.assertEqual(record.as_row()['seed'], 2**64 - 1)
