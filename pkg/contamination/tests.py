import math
import tempfile
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from contamination.adversaries import (
    AtomicMeasure, MixtureOfPoints, NullAdversary, PointShift, adversary_from_json,
)
from contamination.datasets import read_dataset, write_dataset
from contamination.forms import model_from_payload
from contamination.sampling import ContaminationModel, draw_contaminated, population_cf
from core.exceptions import ArgumentError
from distributions.base import BaseDistribution
from lowerbound.measures import SignedAtomicMeasure

GAUSSIAN = BaseDistribution.gaussian(1)


def all_adversaries():
    return [
        PointShift([2.0]),
        MixtureOfPoints([[1.5], [-0.7], [3.0]], [0.2, 0.5, 0.3]),
        AtomicMeasure(SignedAtomicMeasure.from_atoms([-0.4, 0.0, 0.9], [0.25, 0.5, 0.25])),
        NullAdversary(),
    ]


class DrawContaminatedTests(SimpleTestCase):

    def test_alpha_zero_is_shifted_base(self):
        model = ContaminationModel(0.0, [0.3], PointShift([50.0]), GAUSSIAN)
        samples = draw_contaminated(model, 1, 20000)
        self.assertLess(samples.max(), 10.0)
        self.assertAlmostEqual(samples.mean(), 0.3, delta=4 / math.sqrt(20000))

    def test_null_adversary_collapses_mixture(self):
        model = ContaminationModel(0.4, [1.0], NullAdversary(), GAUSSIAN)
        samples = draw_contaminated(model, 2, 20000)
        self.assertAlmostEqual(samples.mean(), 1.0, delta=4 / math.sqrt(20000))
        self.assertAlmostEqual(samples.var(), 1.0, delta=0.05)

    def test_point_shift_fraction(self):
        n = 10**5
        model = ContaminationModel(0.2, [0.0], PointShift([5.0]), GAUSSIAN)
        samples = draw_contaminated(model, 3, n)
        self.assertAlmostEqual(np.mean(samples[:, 0] > 2.5), 0.2, delta=0.01)

    def test_clean_fraction_band(self):
        n = 10**5
        alpha = 0.15
        model = ContaminationModel(alpha, [0.0], PointShift([12.0]), GAUSSIAN)
        samples, clean = draw_contaminated(model, 4, n, return_clean_mask=True)
        attributed = np.mean(samples[:, 0] < 6.0)
        band = 4 * math.sqrt(alpha * (1 - alpha) / n)
        self.assertAlmostEqual(attributed, 1 - alpha, delta=band)
        self.assertEqual(attributed, clean.mean())

    def test_deterministic_given_seed(self):
        model = ContaminationModel(0.3, [0.0], all_adversaries()[1], GAUSSIAN)
        np.testing.assert_array_equal(draw_contaminated(model, 7, 100), draw_contaminated(model, 7, 100))

    def test_ecf_matches_population_cf(self):
        n = 10**5
        rng = np.random.default_rng(5)
        for adversary in all_adversaries():
            model = ContaminationModel(0.3, [0.2], adversary, GAUSSIAN)
            samples = draw_contaminated(model, rng, n)[:, 0]
            for omega in rng.uniform(-2, 2, size=20):
                empirical = np.mean(np.exp(2j * math.pi * omega * samples))
                self.assertLessEqual(abs(population_cf(model, omega) - empirical), 5 / math.sqrt(n))

    def test_two_dimensional_draw(self):
        model = ContaminationModel(0.1, [0.0, 1.0], PointShift([4.0, 4.0]), BaseDistribution.laplace(2))
        self.assertEqual(draw_contaminated(model, 0, 10).shape, (10, 2))


class PopulationCfTests(SimpleTestCase):

    def test_origin(self):
        for adversary in all_adversaries():
            model = ContaminationModel(0.25, [0.1], adversary, GAUSSIAN)
            self.assertAlmostEqual(population_cf(model, 0.0), 1.0, places=14)

    def test_no_contamination_value(self):
        model = ContaminationModel(0.0, [0.3], NullAdversary(), GAUSSIAN)
        expected = math.exp(-2 * math.pi ** 2 * 0.25) * np.exp(2j * math.pi * 0.15)
        self.assertAlmostEqual(abs(population_cf(model, 0.5) - expected), 0.0, places=14)

    def test_point_shift_formula(self):
        alpha, mu, z = 0.2, 0.4, -3.0
        model = ContaminationModel(alpha, [mu], PointShift([z]), GAUSSIAN)
        for omega in (0.1, 0.33, 0.9):
            expected = GAUSSIAN.cf(omega) * (
                (1 - alpha) * np.exp(2j * math.pi * omega * mu) + alpha * np.exp(2j * math.pi * omega * z)
            )
            self.assertAlmostEqual(abs(population_cf(model, omega) - expected), 0.0, places=14)


class ValidationTests(SimpleTestCase):

    def test_mixture_probabilities_must_sum_to_one(self):
        with self.assertRaises(ArgumentError):
            MixtureOfPoints([[0.0], [1.0]], [0.5, 0.6])

    def test_atomic_adversary_must_be_probability(self):
        with self.assertRaises(ArgumentError):
            AtomicMeasure(SignedAtomicMeasure.from_atoms([0.0, 1.0], [1.2, -0.2]))

    def test_alpha_range(self):
        with self.assertRaises(ArgumentError):
            ContaminationModel(0.5, [0.0], NullAdversary(), GAUSSIAN)

    def test_dimension_mismatch(self):
        with self.assertRaises(ArgumentError):
            ContaminationModel(0.1, [0.0, 0.0], PointShift([1.0]), BaseDistribution.gaussian(2))

    def test_form_rejects_zero_alpha(self):
        payload = {'alpha': 0.0, 'mu': [0.0], 'adversary': {'kind': 'null'},
                   'base': {'kind': 'gaussian', 'd': 1}}
        with self.assertRaises(ValidationError):
            model_from_payload(payload)

    def test_form_builds_model(self):
        payload = {'alpha': 0.1, 'mu': [0.3], 'adversary': {'kind': 'point_shift', 'z': [5]},
                   'base': {'kind': 'gaussian', 'd': 1}}
        model = model_from_payload(payload)
        self.assertEqual(model.adversary, PointShift([5.0]))
        self.assertEqual(ContaminationModel.from_json(model.to_json()).to_json(), model.to_json())

    def test_adversary_json_round_trip(self):
        for adversary in all_adversaries():
            rebuilt = adversary_from_json(adversary.to_json())
            self.assertEqual(rebuilt.to_json(), adversary.to_json())


class DatasetFileTests(SimpleTestCase):

    def test_write_then_read(self):
        model = ContaminationModel(0.2, [0.0, 1.0], PointShift([3.0, 3.0]), BaseDistribution.gaussian(2))
        samples = draw_contaminated(model, 42, 25)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'data.csv'
            write_dataset(path, samples, seed=42, model=model)
            loaded, metadata = read_dataset(path)
            self.assertTrue(path.read_text().startswith('# seed: 42\n# model: '))
        np.testing.assert_array_equal(loaded, samples)
        self.assertEqual(metadata['seed'], 42)
        self.assertEqual(metadata['model'], model.to_json())

    def test_read_is_bit_exact(self):
        # 17 significant digits that the default C parser can misround
        values = np.array([
            0.1 + 0.2, 1.0 / 3.0, 2.0 / 3.0, math.pi * 1e10, -1.0000000000000002,
            1e-300, 123456.78901234567, 0.30000000000000004,
        ])
        rng = np.random.default_rng(7)
        samples = np.concatenate([values, rng.standard_normal(5000) * 1e3]).reshape(-1, 1)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'data.csv'
            write_dataset(path, samples)
            loaded, metadata = read_dataset(path)
        self.assertEqual(metadata, {})
        np.testing.assert_array_equal(loaded.view(np.uint64), samples.view(np.uint64))

    def test_missing_file(self):
        with self.assertRaises(ArgumentError):
            read_dataset('/nonexistent/samples.csv')
