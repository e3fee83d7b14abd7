import cmath
import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from contamination.adversaries import PointShift
from contamination.sampling import ContaminationModel, draw_contaminated, null_model, population_cf
from core.exceptions import ArgumentError, ResourceError
from distributions.base import BaseDistribution
from estimator.claims import (
    check_large_T, check_score_soundness, check_small_T, population_scores,
    population_statistic, verify_claims,
)
from estimator.config import (
    PRESETS, EstimatorConfig, PresetKind, desk_preset_config, desk_sine_threshold, preset_config,
)
from estimator.forms import EstimatorConfigForm
from estimator.tournament import (
    build_search_set, ecf, estimate, frequency_radius, precenter, sample_budget, test_statistic,
)
from spectral.covers import build_cover
from spectral.witness import find_witness

GAUSSIAN = BaseDistribution.gaussian(1)


def shifted_gaussian_model(alpha=0.1, mu=0.3, z=5.0):
    return ContaminationModel(alpha, [mu], PointShift([z]), GAUSSIAN)


class PresetTests(SimpleTestCase):

    def test_gaussian_preset_values(self):
        config = preset_config(GAUSSIAN, 0.5, 0.1)
        self.assertAlmostEqual(config.A, 0.4, places=14)
        self.assertAlmostEqual(config.delta, 0.258, places=3)
        self.assertAlmostEqual(config.M1, math.sqrt(2 / math.pi), places=14)
        self.assertEqual(config.budget_constant_C, 64.0)
        self.assertAlmostEqual(config.separation_c, 0.08, places=12)

    def test_sine_threshold_is_raised(self):
        config = preset_config(BaseDistribution.uniform(), 0.5, 0.3)
        self.assertAlmostEqual(config.A, 1.05 * 0.6 / 0.7, places=12)
        self.assertGreater(config.margin, 0)

    def test_uniform_preset_delta(self):
        config = preset_config(BaseDistribution.uniform(), 0.4, 0.1)
        self.assertAlmostEqual(config.A, 1 / math.sqrt(2), places=14)
        self.assertAlmostEqual(config.delta, 0.4 / (3 * math.pi), places=14)

    def test_laplace_lipschitz_follows_radius(self):
        dist = BaseDistribution.laplace(2)
        config = preset_config(dist, 0.5, 0.1)
        self.assertAlmostEqual(config.L, 2 * math.pi ** 2 * config.norm_bound(2), places=10)

    def test_uniform_conv_preset(self):
        config = preset_config(BaseDistribution.uniform_conv(2), 0.5, 0.1)
        self.assertGreater(config.delta, 0)
        self.assertLess(config.delta, 1)

    def test_alpha_too_large(self):
        with self.assertRaises(ArgumentError):
            preset_config(GAUSSIAN, 0.5, 0.4)

    def test_config_validation(self):
        base = dict(epsilon=0.5, alpha=0.1, R=2.0, A=0.4, delta=0.2, L=1.0, M1=1.0)
        EstimatorConfig(**base)
        for key, value in (('epsilon', 1.0), ('alpha', 0.5), ('R', 1.0), ('A', 0.2), ('delta', 0.0)):
            with self.assertRaises(ArgumentError, msg=key):
                EstimatorConfig(**{**base, key: value})
        with self.assertRaises(ArgumentError):
            EstimatorConfig(**base, cf_mode='empirical')
        with self.assertRaises(ArgumentError):
            EstimatorConfig(**base, cf_mode='guess')

    def test_json_round_trip(self):
        config = preset_config(GAUSSIAN, 0.5, 0.1, cf_mode='empirical', clean_count_m=1000)
        self.assertEqual(EstimatorConfig.from_json(config.to_json()), config)


class DeskPresetTests(SimpleTestCase):

    def test_gaussian_desk_values(self):
        config = desk_preset_config(GAUSSIAN, 0.5, 0.3)
        level = 0.45 / 0.7
        omega = math.asin(level) / (math.pi * 0.5)
        self.assertAlmostEqual(desk_sine_threshold(0.3), level, places=14)
        self.assertAlmostEqual(config.delta, math.exp(-2 * math.pi ** 2 * omega ** 2), places=12)
        self.assertAlmostEqual(config.delta, 0.0202, places=3)
        self.assertAlmostEqual(config.candidate_resolution, 0.5 / 8, places=14)
        self.assertAlmostEqual(config.frequency_resolution, min(omega, 0.5) / 8, places=14)
        self.assertEqual(config.A, preset_config(GAUSSIAN, 0.5, 0.3).A)
        self.assertGreater(config.margin, 0)

    def test_desk_delta_is_far_above_theory_delta(self):
        for eps in (0.8, 0.7, 0.6, 0.5):
            desk = desk_preset_config(GAUSSIAN, eps, 0.3)
            theory = preset_config(GAUSSIAN, eps, 0.3)
            self.assertGreater(desk.delta, 1e-2, msg=eps)
            self.assertGreater(desk.delta, theory.delta, msg=eps)

    def test_uniform_desk_uses_numeric_witness(self):
        uniform = BaseDistribution.uniform()
        deltas = [desk_preset_config(uniform, eps, 0.1).delta for eps in (0.4, 0.2, 0.1)]
        self.assertEqual(deltas, sorted(deltas, reverse=True))
        self.assertGreater(deltas[-1], 0.1)

    def test_overrides_win(self):
        config = desk_preset_config(GAUSSIAN, 0.5, 0.3, delta=0.05, candidate_resolution=0.1)
        self.assertEqual(config.delta, 0.05)
        self.assertEqual(config.candidate_resolution, 0.1)

    def test_dispatch_table(self):
        self.assertIs(PRESETS[PresetKind('desk')], desk_preset_config)
        self.assertIs(PRESETS[PresetKind.THEORY], preset_config)

    def test_alpha_range(self):
        with self.assertRaises(ArgumentError):
            desk_sine_threshold(0.5)
        with self.assertRaises(ArgumentError):
            desk_preset_config(GAUSSIAN, 0.5, 0.4)


class EstimatorConfigFormTests(SimpleTestCase):

    def test_missing_fields_come_from_preset(self):
        form = EstimatorConfigForm(data={'epsilon': 0.5, 'alpha': 0.1}, dist=GAUSSIAN)
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data['config'], preset_config(GAUSSIAN, 0.5, 0.1))

    def test_explicit_fields_win(self):
        form = EstimatorConfigForm(
            data={'epsilon': 0.5, 'alpha': 0.1, 'delta': 0.1, 'L': 2.0, 'budget_constant_C': 8},
            dist=GAUSSIAN,
        )
        self.assertTrue(form.is_valid(), form.errors)
        config = form.cleaned_data['config']
        self.assertEqual((config.delta, config.L, config.budget_constant_C), (0.1, 2.0, 8.0))

    def test_invalid_configs(self):
        for data in ({'alpha': 0.1}, {'epsilon': 0.5, 'alpha': 0.1, 'R': 1.0},
                     {'epsilon': 0.5, 'alpha': 0.45}, {'epsilon': 0.5, 'alpha': 0.1, 'cf_mode': 'empirical'}):
            self.assertFalse(EstimatorConfigForm(data=data, dist=GAUSSIAN).is_valid(), data)


class PrecenterTests(SimpleTestCase):

    def test_clean_gaussian(self):
        n = 10**5
        samples = GAUSSIAN.sample(41, n) + 0.7
        self.assertLessEqual(abs(precenter(samples, 0.1)[0] - 0.7), 4 / math.sqrt(n))

    def test_identical_samples(self):
        samples = np.tile([1.5, -2.0], (9, 1))
        np.testing.assert_array_equal(precenter(samples, 0.2), [1.5, -2.0])

    def test_far_outliers(self):
        n = 10**4
        for seed in range(30):
            samples = GAUSSIAN.sample(seed, n)
            samples[: n // 5] = 1e6
            self.assertLessEqual(abs(precenter(samples, 0.2)[0]), 0.5)

    def test_preconditions(self):
        with self.assertRaises(ArgumentError):
            precenter(np.empty((0, 1)), 0.1)
        with self.assertRaises(ArgumentError):
            precenter(np.zeros((5, 1)), 0.34)


class SampleBudgetTests(SimpleTestCase):

    def test_worked_example(self):
        config = EstimatorConfig(
            epsilon=0.5, alpha=0.1, R=2.0, A=1 / 3, delta=0.1,
            L=math.e / 60, M1=2 * math.pi * 0.1, budget_constant_C=1.0,
        )
        self.assertEqual(sample_budget(config, 1), 10000)

    def test_halving_delta(self):
        config = preset_config(GAUSSIAN, 0.5, 0.1)
        argument = config.norm_bound(1) * config.R * config.L / (config.delta * config.A)
        ratio = sample_budget(config.replace(delta=config.delta / 2), 1) / sample_budget(config, 1)
        self.assertGreater(ratio, 4)
        self.assertLess(ratio, 4 * (1 + math.log(4) / math.log(argument)) + 1e-3)

    def test_nonpositive_log(self):
        config = preset_config(GAUSSIAN, 0.5, 0.1, L=1e-6)
        with self.assertRaises(ArgumentError):
            sample_budget(config, 1)

    def test_gaussian_budget_grows_exponentially(self):
        alpha = 0.05
        epsilons = np.array([0.5, 0.4, 0.3, 0.25, 0.2])
        budgets = np.array([sample_budget(preset_config(GAUSSIAN, eps, alpha), 1) for eps in epsilons])
        self.assertTrue(np.all(np.diff(budgets) > 0))
        slope = np.polyfit((alpha / epsilons) ** 2, np.log(budgets), 1)[0]
        self.assertGreater(slope, 0)


class EcfTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(ecf([[0.0]], 2.3), 1 + 0j)
        self.assertAlmostEqual(abs(ecf([0.25, -0.25], 1.0)), 0.0, places=15)
        value = ecf([1.0, 1.0, 1.0], 0.5)
        self.assertAlmostEqual(value.real, -1.0, places=14)
        self.assertAlmostEqual(value.imag, 0.0, places=14)

    def test_block_size_does_not_change_result(self):
        samples = GAUSSIAN.sample(42, 5000)
        omegas = np.linspace(-1, 1, 70)
        np.testing.assert_allclose(ecf(samples, omegas, block_size=97), ecf(samples, omegas), atol=1e-13)

    def test_magnitude_bound(self):
        samples = BaseDistribution.laplace(2).sample(43, 2000)
        values = ecf(samples, np.random.default_rng(44).uniform(-2, 2, size=(30, 2)))
        self.assertTrue(np.all(np.abs(values) <= 1 + 1e-12))


class SearchSetTests(SimpleTestCase):

    def setUp(self):
        self.cover = build_cover(1.0, 0.01, 1)

    def test_zero_level_keeps_everything(self):
        self.assertEqual(len(build_search_set(self.cover, GAUSSIAN, 0.0)), len(self.cover))

    def test_gaussian_level(self):
        result = build_search_set(self.cover, GAUSSIAN, 0.5)
        radius = math.sqrt(math.log(2) / (2 * math.pi ** 2))
        expected = self.cover.points[np.abs(self.cover.points[:, 0]) <= radius]
        np.testing.assert_array_equal(result.frequencies, expected)

    def test_level_above_one_is_empty(self):
        self.assertEqual(len(build_search_set(self.cover, GAUSSIAN, 1.01)), 0)

    def test_empirical_mode_lowers_level(self):
        clean = GAUSSIAN.sample(45, 10**4)
        result = build_search_set(self.cover, GAUSSIAN, 0.5, cf_mode='empirical', clean_samples=clean)
        self.assertAlmostEqual(result.level, 0.5 - 5 / math.sqrt(10**4), places=14)
        self.assertGreaterEqual(len(result), len(build_search_set(self.cover, GAUSSIAN, 0.5)))


class TestStatisticTests(SimpleTestCase):

    def test_perfect_match(self):
        psi = cmath.exp(2j * math.pi * 0.7 * 0.3)
        self.assertAlmostEqual(abs(test_statistic(0.3, 0.7, psi, 0.0)), 0.0, places=15)

    def test_true_mean_statistic_is_alpha(self):
        model = shifted_gaussian_model(alpha=0.2)
        omegas = np.random.default_rng(46).uniform(-3, 3, size=50)
        values = np.abs(population_statistic(model, model.mu, omegas))
        self.assertTrue(np.all(values <= 0.2 + 1e-12))

    def test_witness_statistic_is_large(self):
        model = shifted_gaussian_model(alpha=0.2)
        mu_hat = np.array([0.9])
        witness = find_witness(GAUSSIAN, mu_hat - model.mu, 0.5, 1e-3)
        check = check_large_T(model, mu_hat, witness.omega)
        self.assertTrue(check.holds)
        self.assertGreaterEqual(check.value, 2 * 0.8 * 0.5 - 0.2 - 1e-12)

    def test_batch_shape(self):
        stats = test_statistic(np.zeros((4, 1)), np.ones((3, 1)), np.zeros(3), 0.1)
        self.assertEqual(stats.shape, (4, 3))


class EstimateTests(SimpleTestCase):

    def setUp(self):
        self.config = preset_config(GAUSSIAN, 0.5, 0.1)
        self.model = shifted_gaussian_model()
        self.n = sample_budget(self.config, 1)

    def test_budget_and_cover_sizes(self):
        self.assertTrue(130_000 < self.n < 140_000, self.n)
        samples = draw_contaminated(self.model, 0, self.n)
        report = estimate(self.config, samples, GAUSSIAN)
        self.assertEqual(report.search_set_size, 11)
        self.assertEqual(report.candidate_count, 71)
        self.assertEqual(report.sample_budget, self.n)
        self.assertEqual(report.warnings, [])
        self.assertIn(report.mu_hat.tolist(), report.candidates.tolist())
        self.assertEqual(report.score, report.per_candidate_scores.min())

    def test_success_rate(self):
        successes = 0
        for seed in range(30):
            samples = draw_contaminated(self.model, seed, self.n)
            report = estimate(self.config, samples, GAUSSIAN)
            successes += abs(report.mu_hat[0] - 0.3) <= 0.5
        self.assertGreaterEqual(successes, 20)

    def test_concentration(self):
        level = self.config.delta / 2
        radius = frequency_radius(self.config, GAUSSIAN, level, 1)
        freqs = build_search_set(
            build_cover(radius, self.config.frequency_eta(), 1), GAUSSIAN, level
        ).frequencies
        target = population_cf(self.model, freqs)
        tolerance = self.config.margin * self.config.delta / 4
        within = 0
        for seed in range(100):
            samples = draw_contaminated(self.model, 1000 + seed, self.n)
            within += np.max(np.abs(ecf(samples, freqs) - target)) <= tolerance
        self.assertGreaterEqual(within, 95)

    def test_translation_equivariance(self):
        samples = draw_contaminated(self.model, 7, 20_000)
        base = estimate(self.config, samples, GAUSSIAN, precentering=False)
        moved = estimate(self.config, samples + 1.7, GAUSSIAN, precentering=False, candidate_center=[1.7])
        np.testing.assert_allclose(moved.mu_hat, base.mu_hat + 1.7, atol=1e-9)
        np.testing.assert_allclose(moved.per_candidate_scores, base.per_candidate_scores, atol=1e-9)

    def test_bitwise_determinism(self):
        samples = draw_contaminated(self.model, 8, 20_000)
        first = estimate(self.config, samples, GAUSSIAN)
        second = estimate(self.config, draw_contaminated(self.model, 8, 20_000), GAUSSIAN)
        self.assertEqual(first.mu_hat.tobytes(), second.mu_hat.tobytes())
        self.assertEqual(first.per_candidate_scores.tobytes(), second.per_candidate_scores.tobytes())

    def test_null_adversary_recovers_origin(self):
        model = null_model(GAUSSIAN, [0.0])
        samples = draw_contaminated(model, 9, 4 * self.n)
        report = estimate(self.config, samples, GAUSSIAN, precentering=False)
        self.assertLessEqual(abs(report.mu_hat[0]), report.candidate_resolution)

    def test_population_separation(self):
        model = null_model(GAUSSIAN, [0.3])
        eps_prime = self.config.candidate_eta(1)
        candidates = build_cover(self.config.R, eps_prime, 1).points
        level = self.config.delta / 2
        radius = frequency_radius(self.config, GAUSSIAN, level, 1)
        search_set = build_search_set(build_cover(radius, self.config.frequency_eta(), 1), GAUSSIAN, level)
        scores = population_scores(model, candidates, search_set, self.config.alpha)
        distance = np.abs(candidates[:, 0] - 0.3)
        good = scores[np.argmin(distance)]
        far = scores[distance >= self.config.epsilon].min()
        slack = 2 * (1 - self.config.alpha) * math.pi * radius * eps_prime
        self.assertGreater(far - good, self.config.separation_c - slack)

    def test_empirical_cf_mode(self):
        config = preset_config(GAUSSIAN, 0.5, 0.1, cf_mode='empirical', clean_count_m=200_000)
        successes = 0
        for seed in range(5):
            samples = draw_contaminated(self.model, 50 + seed, self.n)
            report = estimate(config, samples, GAUSSIAN, clean_seed=500 + seed)
            successes += abs(report.mu_hat[0] - 0.3) <= 0.5
        self.assertGreaterEqual(successes, 4)

    def test_empty_search_set_is_flagged(self):
        config = self.config.replace(delta=3.0)
        report = estimate(config, draw_contaminated(self.model, 10, 1000), GAUSSIAN)
        self.assertTrue(report.empty_search_set)
        self.assertEqual(report.score, 0.0)
        self.assertTrue(any('empty search set' in w for w in report.warnings))

    def test_small_sample_warning(self):
        report = estimate(self.config, draw_contaminated(self.model, 11, 500), GAUSSIAN)
        self.assertTrue(any('below the sample budget' in w for w in report.warnings))

    @override_settings(SHIFTROBUST={'COVER_SIZE_CAP': 10})
    def test_cover_cap(self):
        with self.assertRaises(ResourceError):
            estimate(self.config, draw_contaminated(self.model, 12, 100), GAUSSIAN)

    def test_dimension_guard(self):
        dist = BaseDistribution.gaussian(4)
        config = preset_config(dist, 0.5, 0.1)
        with self.assertRaises(ArgumentError):
            estimate(config, np.zeros((10, 4)), dist)

    def test_trace_json(self):
        report = estimate(self.config, draw_contaminated(self.model, 13, 2000), GAUSSIAN)
        payload = report.to_json(trace=True)
        self.assertEqual(len(payload['trace']), report.candidate_count)
        self.assertNotIn('trace', report.to_json())


class PopulationClaimTests(SimpleTestCase):

    def test_claim_suite(self):
        summary = verify_claims(seed=3, instances=20, frequencies=100)
        self.assertEqual(summary['large_T']['failed'], 0)
        self.assertEqual(summary['small_T']['failed'], 0)
        self.assertEqual(summary['small_T']['checked'], 2000)
        self.assertGreater(summary['large_T']['checked'], 0)

    def test_small_T_at_random_frequencies(self):
        model = ContaminationModel(0.25, [0.1, -0.2], PointShift([4.0, 4.0]), BaseDistribution.laplace(2))
        rng = np.random.default_rng(47)
        for omega in rng.uniform(-2, 2, size=(100, 2)):
            self.assertTrue(check_small_T(model, [0.6, 0.3], omega).holds)

    def test_score_soundness(self):
        config = preset_config(GAUSSIAN, 0.5, 0.1)
        model = shifted_gaussian_model()
        level = config.delta / 2
        radius = frequency_radius(config, GAUSSIAN, level, 1)
        search_set = build_search_set(build_cover(radius, config.frequency_eta(), 1), GAUSSIAN, level)
        checked = 0
        for mu_hat in np.linspace(-1.7, 2.3, 41):
            if abs(mu_hat - 0.3) < config.epsilon:
                continue
            check = check_score_soundness(model, [mu_hat], config, search_set)
            if check is not None:
                checked += 1
                self.assertTrue(check.holds, (mu_hat, check))
        self.assertGreater(checked, 0)
