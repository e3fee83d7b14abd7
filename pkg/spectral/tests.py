import math

import numpy as np
from django.test import SimpleTestCase
from scipy import special

from core.exceptions import ArgumentError, ResourceError, UnsupportedError
from distributions.base import BaseDistribution
from spectral.covers import build_cover, predicted_cover_size, sphere_directions
from spectral.hardness import (
    BandSet, band_l2_mass, delta_quantity, l2_linfty_check, witness_threshold,
)
from spectral.witness import find_witness, scan_grid_for_witness, witness_norm_bound


def random_ball_points(rng, count, radius, d):
    directions = rng.standard_normal((count, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(0, 1, size=count) ** (1.0 / d)
    return directions * radii[:, None]


class CoverTests(SimpleTestCase):

    def test_unit_resolution_covers_interval(self):
        cover = build_cover(1.0, 1.0, 1)
        probes = np.arange(-1.0, 1.0 + 1e-9, 0.01).reshape(-1, 1)
        self.assertTrue(np.all(cover.nearest(probes) <= 1.0 + 1e-12))

    def test_coarse_resolution_single_point(self):
        cover = build_cover(1.0, 2.0, 1)
        self.assertGreaterEqual(len(cover), 1)
        probes = np.linspace(-1, 1, 201).reshape(-1, 1)
        self.assertTrue(np.all(cover.nearest(probes) <= 2.0))

    def test_size_bound_and_coverage_2d(self):
        cover = build_cover(1.0, 0.1, 2)
        self.assertLessEqual(len(cover), (1 + 40) ** 2)
        probes = random_ball_points(np.random.default_rng(21), 10**4, 1.0, 2)
        self.assertTrue(np.all(cover.nearest(probes) <= 0.1 + 1e-12))
        self.assertTrue(np.all(np.linalg.norm(cover.points, axis=1) <= 1.1 + 1e-12))

    def test_coverage_3d(self):
        cover = build_cover(0.5, 0.1, 3)
        probes = random_ball_points(np.random.default_rng(22), 2000, 0.5, 3)
        self.assertTrue(np.all(cover.nearest(probes) <= 0.1 + 1e-12))

    def test_points_are_lexicographic(self):
        cover = build_cover(1.0, 0.3, 2)
        rows = [tuple(p) for p in cover.points]
        self.assertEqual(rows, sorted(rows))

    def test_center_shift(self):
        cover = build_cover(1.0, 0.5, 1, center=[3.0])
        self.assertTrue(np.all(np.abs(cover.points[:, 0] - 3.0) <= 1.5 + 1e-12))

    def test_cap_raises_resource_error(self):
        with self.assertRaises(ResourceError) as ctx:
            build_cover(10.0, 0.001, 2, cap=1000)
        self.assertEqual(ctx.exception.required, predicted_cover_size(10.0, 0.001, 2))

    def test_dimension_guard(self):
        with self.assertRaises(ArgumentError):
            build_cover(1.0, 0.1, 4)
        with self.assertRaises(ArgumentError):
            build_cover(-1.0, 0.1, 1)

    def test_sphere_directions_are_unit(self):
        for d, count in ((1, 1), (2, 16), (3, 50)):
            directions = sphere_directions(d, count)
            np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0, atol=1e-12)


class WitnessTests(SimpleTestCase):

    def test_norm_bound_formula(self):
        self.assertAlmostEqual(witness_norm_bound(1.0, 1 / (2 * math.pi), 1), 1.0, places=14)
        self.assertAlmostEqual(witness_norm_bound(1.0, 1 / math.pi, 4), 1.0, places=14)
        self.assertAlmostEqual(
            witness_norm_bound(0.7, 0.4, 2), 2 * witness_norm_bound(0.7, 0.8, 2), places=14
        )

    def test_gaussian_analytic_witness(self):
        result = find_witness(BaseDistribution.gaussian(1), 0.5, 0.2, 0.5)
        self.assertTrue(result.found)
        self.assertEqual(result.source, 'analytic')
        self.assertAlmostEqual(result.omega[0], math.asin(0.2) / (math.pi * 0.5), places=12)
        self.assertAlmostEqual(result.omega[0], 0.12823, places=5)
        self.assertAlmostEqual(result.sin_value, 0.2, places=12)
        self.assertAlmostEqual(result.cf_magnitude, 0.7229, places=4)

    def test_zero_threshold_gives_origin(self):
        result = find_witness(BaseDistribution.laplace(2), [0.3, -0.1], 0.0, 0.2)
        np.testing.assert_array_equal(result.omega, np.zeros(2))
        self.assertEqual(result.cf_magnitude, 1.0)

    def test_uniform_first_lobe(self):
        delta = 2 / math.pi
        result = find_witness(BaseDistribution.uniform(), 2.0, 1 / math.sqrt(2), delta)
        self.assertTrue(result.found)
        self.assertTrue(1 / 8 - 1e-12 <= result.omega[0] <= 3 / 8 + 1e-12)
        self.assertGreaterEqual(result.cf_magnitude, delta)

    def test_unreachable_threshold(self):
        self.assertFalse(find_witness(BaseDistribution.gaussian(1), 0.5, 0.9, 0.999).found)
        self.assertFalse(find_witness(BaseDistribution.gaussian(1), 0.5, 1.5, 0.1).found)

    def test_small_grid_rejected(self):
        grid = build_cover(0.1, 0.01, 1)
        with self.assertRaises(ArgumentError):
            find_witness(BaseDistribution.gaussian(1), 0.5, 0.2, 0.1, grid=grid)

    def test_zero_error_vector_rejected(self):
        with self.assertRaises(ArgumentError):
            find_witness(BaseDistribution.gaussian(1), 0.0, 0.2, 0.1)

    def test_witnesses_respect_norm_bound(self):
        rng = np.random.default_rng(31)
        eta = 0.02
        for dist in (BaseDistribution.gaussian(1), BaseDistribution.laplace(2),
                     BaseDistribution.uniform(), BaseDistribution.uniform_conv(3)):
            for _ in range(10):
                directions = sphere_directions(dist.dimension, 7)
                v = rng.uniform(0.3, 2.0) * directions[rng.integers(len(directions))]
                A = rng.uniform(0.1, 0.7)
                delta = rng.uniform(0.05, 0.4)
                bound = witness_norm_bound(dist.constants.deriv_l1_M1, delta, dist.dimension)
                grid = build_cover(bound, eta, dist.dimension)
                result = find_witness(dist, v, A, delta, grid=grid)
                if result.found:
                    self.assertLessEqual(np.linalg.norm(result.omega), bound + eta + 1e-12)
                    self.assertGreaterEqual(result.sin_value, A * (1 - 1e-12))
                    self.assertGreaterEqual(result.cf_magnitude, delta)

    def test_cover_preserves_witness(self):
        rng = np.random.default_rng(32)
        dists = [BaseDistribution.gaussian(1), BaseDistribution.laplace(1), BaseDistribution.gaussian(2)]
        eta = 0.01
        for case in range(50):
            dist = dists[case % len(dists)]
            d = dist.dimension
            direction = rng.standard_normal(d)
            v = rng.uniform(0.6, 1.5) * direction / np.linalg.norm(direction)
            A = rng.uniform(0.2, 0.5)
            candidate = find_witness(dist, v, A, 1e-6)
            self.assertEqual(candidate.source, 'analytic')
            delta = 0.9 * candidate.cf_magnitude
            grid = build_cover(
                witness_norm_bound(dist.constants.deriv_l1_M1, delta, d), eta, d
            )
            relaxed = scan_grid_for_witness(
                dist, v,
                A - math.pi * eta * np.linalg.norm(v) - 1e-12,
                delta - eta * dist.constants.lipschitz_L - 1e-12,
                grid,
            )
            self.assertTrue(relaxed.found, f'case {case}: {dist.label}, v={v}, A={A:.3f}')


class DeltaQuantityTests(SimpleTestCase):

    def test_uniform_beats_lower_bound(self):
        result = delta_quantity(BaseDistribution.uniform(), 0.5, 0.1)
        self.assertFalse(result.empty_feasible_set)
        self.assertGreaterEqual(result.value, 0.5 / (3 * math.pi))

    def test_gaussian_matches_witness(self):
        dist = BaseDistribution.gaussian(1)
        for epsilon, alpha in ((0.5, 0.1), (0.3, 0.2), (1.0, 0.4)):
            result = delta_quantity(dist, epsilon, alpha)
            witness = find_witness(dist, epsilon, math.sin(math.pi * alpha), 1e-6)
            self.assertAlmostEqual(result.value, witness.cf_magnitude, places=9)
            self.assertAlmostEqual(result.value, math.exp(-2 * math.pi ** 2 * (alpha / epsilon) ** 2), places=9)

    def test_monotone_in_epsilon(self):
        dist = BaseDistribution.gaussian(1)
        values = [delta_quantity(dist, eps, 0.2).value for eps in (0.2, 0.3, 0.45, 0.6, 0.8, 1.0)]
        for smaller, larger in zip(values, values[1:]):
            self.assertLessEqual(smaller, larger)

    def test_small_alpha_approaches_one(self):
        result = delta_quantity(BaseDistribution.laplace(1), 0.5, 1e-6)
        self.assertGreater(result.value, 0.999)
        self.assertLessEqual(result.value, 1.0)

    def test_empty_feasible_set_is_flagged(self):
        result = delta_quantity(BaseDistribution.gaussian(1), 0.5, 0.3, omega_max=0.1)
        self.assertTrue(result.empty_feasible_set)
        self.assertEqual(result.value, 0.0)
        self.assertIsNone(result.omega)

    def test_isotropic_gaussian_2d(self):
        result = delta_quantity(BaseDistribution.gaussian(2), 0.5, 0.15)
        self.assertAlmostEqual(result.value, math.exp(-2 * math.pi ** 2 * 0.09), places=6)
        self.assertAlmostEqual(np.linalg.norm(result.v), 0.5, places=12)

    def test_argument_checks(self):
        with self.assertRaises(ArgumentError):
            delta_quantity(BaseDistribution.gaussian(1), 0.0, 0.1)
        with self.assertRaises(ArgumentError):
            delta_quantity(BaseDistribution.gaussian(1), 0.5, 0.5)

    def test_witness_threshold_uniform(self):
        value = witness_threshold(BaseDistribution.uniform(), 0.5, 1 / math.sqrt(2))
        self.assertGreaterEqual(value, 0.5 / (3 * math.pi))
        self.assertLessEqual(value, 1.0)


class BandMassTests(SimpleTestCase):

    def test_full_halfwidth_is_empty(self):
        self.assertEqual(band_l2_mass(BaseDistribution.gaussian(1), 0.2, 0.5), 0.0)

    def test_gaussian_tail_closed_form(self):
        result = band_l2_mass(BaseDistribution.gaussian(1), 0.1, 0.05)
        bound = math.sqrt(special.erfc(math.pi) / (2 * math.sqrt(math.pi)))
        self.assertLessEqual(result, bound * (1 + 1e-3))
        self.assertGreater(result, 0.99 * bound)

    def test_laplace_exponent(self):
        dist = BaseDistribution.laplace(1)
        epsilons = np.array([0.1, 0.05, 0.025, 0.0125])
        masses = np.array([band_l2_mass(dist, eps, 0.12) for eps in epsilons])
        slope = np.polyfit(np.log(epsilons), np.log(masses), 1)[0]
        self.assertAlmostEqual(slope, 1.5, delta=0.15)

    def test_monotone_in_halfwidth(self):
        dist = BaseDistribution.uniform()
        masses = [
            band_l2_mass(dist, 0.5, h, omega_max=200.0, quad_step=0.01)
            for h in (0.4, 0.3, 0.2, 0.1, 0.05)
        ]
        for narrower, wider in zip(masses, masses[1:]):
            self.assertLessEqual(narrower, wider)

    def test_step_wider_than_band(self):
        with self.assertRaises(ArgumentError):
            band_l2_mass(BaseDistribution.uniform(), 0.5, 0.01, quad_step=0.1)

    def test_multivariate_unsupported(self):
        with self.assertRaises(UnsupportedError):
            band_l2_mass(BaseDistribution.gaussian(2), 0.5, 0.1)


class L2FromLinftyTests(SimpleTestCase):

    def test_empty_set(self):
        result = l2_linfty_check(BaseDistribution.gaussian(1), BandSet.empty())
        self.assertEqual((result.l2, result.linfty, result.ratio_ok), (0.0, 0.0, True))

    def test_gaussian_full_line(self):
        result = l2_linfty_check(BaseDistribution.gaussian(1), BandSet.full(3.0))
        self.assertAlmostEqual(result.l2, math.sqrt(1 / (2 * math.sqrt(math.pi))), places=6)
        self.assertAlmostEqual(result.linfty, 1.0, places=14)
        self.assertTrue(result.ratio_ok)

    def test_uniform_band_sweep(self):
        dist = BaseDistribution.uniform()
        for epsilon, alpha in ((0.5, 0.1), (0.3, 0.2), (0.2, 0.3), (0.1, 0.1), (0.05, 0.2)):
            band = BandSet.band(epsilon, 0.4 * alpha, 50.0)
            result = l2_linfty_check(dist, band)
            self.assertTrue(result.ratio_ok, (epsilon, alpha, result.ratio))
            self.assertGreater(result.l2, 0.0)
