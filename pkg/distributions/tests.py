import math

import numpy as np
from django.test import SimpleTestCase
from scipy import integrate

from core.exceptions import ArgumentError, UnsupportedError
from distributions.base import BaseDistribution, DistributionKind, preset_constants
from distributions.forms import DistributionSpecForm
from distributions.irwin_hall import irwin_hall_cdf, irwin_hall_pdf

ALL_KINDS = [
    BaseDistribution.gaussian(1),
    BaseDistribution.laplace(1),
    BaseDistribution.uniform(),
    BaseDistribution.uniform_conv(3),
]


class CharacteristicFunctionTests(SimpleTestCase):

    def test_cf_at_origin_is_one(self):
        for dist in ALL_KINDS + [BaseDistribution.gaussian(3), BaseDistribution.laplace(2)]:
            value = dist.cf(np.zeros(dist.dimension) if dist.dimension > 1 else 0.0)
            self.assertEqual(value, 1 + 0j)

    def test_known_values(self):
        self.assertEqual(BaseDistribution.uniform().cf(0.5), 0j)
        self.assertAlmostEqual(
            BaseDistribution.gaussian(1).cf(0.25).real,
            math.exp(-2 * math.pi ** 2 * 0.0625),
            places=14,
        )
        self.assertAlmostEqual(
            BaseDistribution.laplace(1).cf(1 / (math.pi * math.sqrt(2))).real, 0.5, places=14
        )

    def test_dimension_mismatch(self):
        with self.assertRaises(ArgumentError):
            BaseDistribution.gaussian(2).cf([0.1, 0.2, 0.3])

    def test_conjugate_symmetry_and_magnitude(self):
        rng = np.random.default_rng(11)
        for dist in ALL_KINDS:
            omegas = rng.uniform(-5, 5, size=1000)
            forward = dist.cf(omegas)
            backward = dist.cf(-omegas)
            np.testing.assert_allclose(backward, np.conj(forward), rtol=0, atol=1e-15)
            self.assertTrue(np.all(np.abs(forward) <= 1 + 1e-12))

    def test_decay_bound(self):
        rng = np.random.default_rng(12)
        cases = ALL_KINDS + [BaseDistribution.gaussian(2), BaseDistribution.laplace(3)]
        for dist in cases:
            d = dist.dimension
            omegas = rng.uniform(-3, 3, size=(1000, d))
            norms = np.linalg.norm(omegas, axis=1)
            keep = norms > 1e-6
            bound = math.sqrt(d) * dist.constants.deriv_l1_M1 / (2 * math.pi * norms[keep])
            self.assertTrue(np.all(dist.cf_abs(omegas[keep]) <= bound + 1e-12), dist.label)

    def test_matches_empirical_cf(self):
        n = 10**6
        rng = np.random.default_rng(13)
        for dist in ALL_KINDS:
            samples = dist.sample(rng, n)[:, 0]
            omegas = rng.uniform(-2, 2, size=20)
            for omega in omegas:
                empirical = np.mean(np.exp(2j * math.pi * omega * samples))
                self.assertLessEqual(abs(dist.cf(omega) - empirical), 5 / math.sqrt(n), dist.label)

    def test_density_cf_duality(self):
        omegas = np.linspace(0.05, 1.9, 10)
        for dist in ALL_KINDS:
            radius = dist.effective_support(1e-14)
            edges = np.unique(np.concatenate([[-radius, radius], dist.density_kinks()]))
            edges = edges[(edges >= -radius) & (edges <= radius)]
            for omega in omegas:
                total = sum(
                    integrate.quad(
                        lambda x: dist.density(x) * math.cos(2 * math.pi * omega * x),
                        a, b, limit=200, epsabs=1e-12,
                    )[0]
                    for a, b in zip(edges[:-1], edges[1:])
                )
                self.assertAlmostEqual(total, dist.cf(omega).real, delta=1e-6)


class DensityTests(SimpleTestCase):

    def test_uniform_values(self):
        uniform = BaseDistribution.uniform()
        self.assertEqual(uniform.density(0.0), 0.5)
        self.assertEqual(uniform.density(1.5), 0.0)

    def test_triangular_peak(self):
        self.assertAlmostEqual(BaseDistribution.uniform_conv(2).density(0.0), 0.5, places=14)

    def test_triangular_matches_self_convolution(self):
        box = BaseDistribution.uniform()
        for x in (-1.5, -0.4, 0.0, 0.7, 1.9):
            conv, _ = integrate.quad(lambda y: box.density(y) * box.density(x - y), -1, 1,
                                     points=[x - 1, x + 1])
            self.assertAlmostEqual(BaseDistribution.uniform_conv(2).density(x), conv, places=8)

    def test_densities_integrate_to_one(self):
        for dist in ALL_KINDS:
            radius = dist.effective_support(1e-14)
            edges = np.unique(np.concatenate([[-radius, radius], dist.density_kinks()]))
            total = sum(integrate.quad(dist.density, a, b)[0] for a, b in zip(edges[:-1], edges[1:]))
            self.assertAlmostEqual(total, 1.0, places=7)

    def test_multivariate_density_unsupported(self):
        with self.assertRaises(UnsupportedError):
            BaseDistribution.gaussian(2).density(0.0)

    def test_irwin_hall_cdf_is_density_integral(self):
        for m in (1, 2, 3, 5):
            for x in (-m + 0.3, -0.2, 0.0, 0.9, m - 0.1):
                integral, _ = integrate.quad(lambda t: irwin_hall_pdf(t, m), -m, x,
                                             points=[p for p in range(-m, m + 1, 2) if -m < p < x] or None)
                self.assertAlmostEqual(irwin_hall_cdf(x, m), integral, places=9)

    def test_tail_probability_within_markov_bound(self):
        for dist in ALL_KINDS:
            for r in (0.5, 1.0, 2.0, 4.0):
                self.assertLessEqual(dist.tail_probability(r), dist.constants.tail_sigma / r + 1e-15)


class SamplingTests(SimpleTestCase):

    def test_uniform_mean_band(self):
        n = 10**5
        samples = BaseDistribution.uniform().sample(3, n)
        self.assertLessEqual(abs(samples.mean()), 4 * (1 / math.sqrt(3)) / math.sqrt(n))

    def test_gaussian_variance(self):
        samples = BaseDistribution.gaussian(2).sample(4, 10**5)
        self.assertEqual(samples.shape, (10**5, 2))
        for variance in samples.var(axis=0):
            self.assertTrue(0.97 <= variance <= 1.03)

    def test_same_seed_same_samples(self):
        for dist in ALL_KINDS:
            np.testing.assert_array_equal(dist.sample(99, 50), dist.sample(99, 50))

    def test_rejects_empty_draw(self):
        with self.assertRaises(ArgumentError):
            BaseDistribution.gaussian(1).sample(0, 0)


class PresetConstantTests(SimpleTestCase):

    def test_m1_values(self):
        self.assertAlmostEqual(preset_constants('gaussian').deriv_l1_M1, 0.7978845608, places=9)
        self.assertAlmostEqual(preset_constants('laplace').deriv_l1_M1, math.sqrt(2), places=14)
        self.assertEqual(preset_constants('uniform').deriv_l1_M1, 1.0)
        self.assertAlmostEqual(preset_constants('uniform_conv', m=1).deriv_l1_M1, 1.0, places=14)
        self.assertAlmostEqual(preset_constants('uniform_conv', m=3).deriv_l1_M1, 0.75, places=14)

    def test_gaussian_lipschitz_is_sup_of_derivative(self):
        t = np.linspace(0, 2, 200001)
        slope = 4 * math.pi ** 2 * t * np.exp(-2 * math.pi ** 2 * t ** 2)
        self.assertAlmostEqual(preset_constants('gaussian').lipschitz_L, slope.max(), places=6)

    def test_uniform_lipschitz_dominates_finite_differences(self):
        uniform = BaseDistribution.uniform()
        grid = np.linspace(-3, 3, 60001)
        values = uniform.cf(grid).real
        slopes = np.abs(np.diff(values)) / np.diff(grid)
        self.assertLessEqual(slopes.max(), uniform.constants.lipschitz_L + 1e-9)

    def test_laplace_lipschitz_is_radius_dependent(self):
        self.assertAlmostEqual(
            preset_constants('laplace', radius=2.0).lipschitz_L, 4 * math.pi ** 2, places=12
        )

    def test_tail_sigma_presets(self):
        self.assertEqual(preset_constants('laplace').tail_sigma, 1.0)
        self.assertAlmostEqual(preset_constants('uniform_conv', m=3).tail_sigma, 1.0, places=14)


class DistributionSpecFormTests(SimpleTestCase):

    def test_valid_payload(self):
        form = DistributionSpecForm(data={'kind': 'uniform_conv', 'd': 1, 'm': 4})
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.build(), BaseDistribution.uniform_conv(4))

    def test_uniform_must_be_one_dimensional(self):
        form = DistributionSpecForm(data={'kind': 'uniform', 'd': 2})
        self.assertFalse(form.is_valid())

    def test_round_trip_json(self):
        dist = BaseDistribution.laplace(2)
        self.assertEqual(BaseDistribution.from_json(dist.to_json()), dist)
        self.assertEqual(dist.kind, DistributionKind.LAPLACE)
