import math

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings
from scipy import integrate, special

from core.exceptions import ArgumentError, InfeasibleError, ResourceError, UnsupportedError
from distributions.base import BaseDistribution
from distributions.irwin_hall import irwin_hall_pdf
from lowerbound.construction import (
    boundary_terms, build_g, build_instance, delta_phi_E, feasibility_frontier, g_l1_at,
    jordan_split, minimum_truncation,
)
from lowerbound.forms import instance_params_from_payload
from lowerbound.measures import SignedAtomicMeasure, atomic_cf
from lowerbound.tv import (
    fourier_tv_bound, lower_bound_preset, lower_bound_rate, mixture_tv,
    sample_lower_bound_from_tv, tv_distance,
)
from lowerbound.window import (
    periodized_window, window_derivative, window_derivative_tail, window_hat, window_time,
)

GAUSSIAN = BaseDistribution.gaussian(1)
LAPLACE = BaseDistribution.laplace(1)

# alpha = 0.3 and epsilons where the raw Fourier bound stays below 1
TV_ALPHA = 0.3
TV_EPSILONS = {
    'gaussian': (0.6, 0.5, 0.4, 0.35, 0.3),
    'laplace': (0.4, 0.37, 0.35, 0.32, 0.3),
}


def window_breakpoints(w):
    return [0.0, w, 4 * w / 3, 5 * w / 3, 2 * w]


def inverse_transform(w, x):
    """2 * integral over [0, 2w] of b_hat_w(omega) cos(2 pi omega x)."""
    edges = window_breakpoints(w)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if x == 0:
            value, _ = integrate.quad(lambda t: window_hat(w, t), a, b, epsabs=1e-13, epsrel=1e-13)
        else:
            value, _ = integrate.quad(
                lambda t: window_hat(w, t), a, b, weight='cos', wvar=2 * math.pi * x,
                epsabs=1e-13, epsrel=1e-13,
            )
        total += value
    return 2.0 * total


class WindowTests(SimpleTestCase):

    def test_plateau_and_support(self):
        for w in (0.1, 1.0, 10.0):
            self.assertTrue(np.all(window_hat(w, np.linspace(-w, w, 101)) == 1.0))
            outside = np.concatenate([np.linspace(2 * w, 5 * w, 50), -np.linspace(2 * w, 5 * w, 50)])
            self.assertTrue(np.all(window_hat(w, outside) == 0.0))
            self.assertEqual(window_hat(w, 0.0), 1.0)
            self.assertEqual(window_hat(w, 2.5 * w), 0.0)

    def test_ramp_matches_box_convolution(self):
        w = 0.8
        scale = w / 6
        for omega in (1.1 * w, 1.5 * w, 1.9 * w):
            value = window_hat(w, omega)
            self.assertGreater(value, 0.0)
            self.assertLess(value, 1.0)
            # box of half-width 3w/2 against the density of three boxes of half-width w/6
            lo, hi = omega - 1.5 * w, omega + 1.5 * w
            knots = [t for t in (-w / 2, -w / 6, w / 6, w / 2) if lo < t < hi]
            expected, _ = integrate.quad(
                lambda t: irwin_hall_pdf(t / scale, 3) / scale,
                lo, hi, points=knots, epsabs=1e-13, epsrel=1e-13,
            )
            self.assertAlmostEqual(value, expected, delta=1e-10)
        self.assertAlmostEqual(window_hat(w, 1.5 * w), 0.5, places=14)

    def test_time_domain_matches_quadrature(self):
        rng = np.random.default_rng(8)
        for w in (0.1, 1.0, 10.0):
            for x in rng.uniform(-4.0, 4.0, size=20) / w:
                self.assertAlmostEqual(window_time(w, x), inverse_transform(w, x), delta=1e-8)

    def test_time_domain_peak_and_decay(self):
        for w in (0.1, 1.0, 10.0):
            self.assertAlmostEqual(window_time(w, 0.0), 3 * w, places=12)
            self.assertAlmostEqual(inverse_transform(w, 0.0), 3 * w, places=10)
            x = 100.0 / w
            self.assertLessEqual(abs(window_time(w, x)), 27.0 / (math.pi ** 4 * w ** 3 * x ** 4))

    def test_derivative_matches_finite_difference(self):
        rng = np.random.default_rng(9)
        w = 1.3
        for x in rng.uniform(-5, 5, size=20):
            h = 1e-6
            numeric = (window_time(w, x + h) - window_time(w, x - h)) / (2 * h)
            self.assertAlmostEqual(window_derivative(w, x), numeric, delta=1e-6)

    def test_derivative_tail_bounds_quadrature(self):
        w, X = 1.0, 5.0
        edges = np.arange(X, 400.0, 0.5)
        mass = sum(
            integrate.quad(lambda t: abs(window_derivative(w, t)), a, b, limit=200)[0]
            for a, b in zip(edges[:-1], edges[1:])
        )
        self.assertLessEqual(2 * mass, window_derivative_tail(w, X))

    def test_periodized_window_in_bands_and_gaps(self):
        w, eps = 0.3, 0.5
        for k in range(-4, 5):
            self.assertEqual(periodized_window(w, eps, k / eps + 0.9 * w), 1.0)
            self.assertEqual(periodized_window(w, eps, (k + 0.5) / eps), 0.0)

    def test_overlapping_bands_rejected(self):
        with self.assertRaises(InfeasibleError):
            periodized_window(1.0, 0.5, 0.0)

    def test_width_must_be_positive(self):
        with self.assertRaises(ArgumentError):
            window_hat(0.0, 1.0)


class BuildGTests(SimpleTestCase):

    eps, alpha, w = 0.2, 0.3, 0.45

    def test_total_mass_telescopes(self):
        g = build_g(self.eps, self.alpha, self.w)
        edge = boundary_terms(self.eps, self.alpha, self.w, g.truncation_K)
        self.assertLessEqual(abs(g.total_mass()), 1e-10 + edge)

    def test_odd_symmetry_is_exact(self):
        g = build_g(self.eps, self.alpha, self.w)
        np.testing.assert_array_equal(g.locations, -g.locations[::-1])
        np.testing.assert_array_equal(g.weights, -g.weights[::-1])

    def test_atoms_sit_at_half_lattice(self):
        K = minimum_truncation(self.w, self.eps) + 5
        with override_settings(SHIFTROBUST={'TAIL_RELATIVE_TOL': 1.0}):
            g = build_g(self.eps, self.alpha, self.w, K=K)
        self.assertEqual(g.truncation_K, K)
        self.assertLessEqual(len(g), 2 * K + 2)
        offsets = g.locations / self.eps - 0.5
        np.testing.assert_allclose(offsets, np.round(offsets), atol=1e-9)

    def test_l1_norm_scales_with_eps_w_over_alpha(self):
        ratios = []
        for eps, alpha, w in ((0.2, 0.3, 0.45), (0.1, 0.2, 0.5), (0.5, 0.1, 0.05)):
            g = build_g(eps, alpha, w)
            ratios.append(g.l1_norm() / ((1 - alpha) * eps * w / alpha))
        # realized constant of the eps w / alpha scaling
        self.assertLess(max(ratios) / min(ratios), 1.5)
        self.assertLess(max(ratios), 30.0)

    def test_tail_certificate_against_longer_truncation(self):
        g = build_g(self.eps, self.alpha, self.w)
        K = g.truncation_K
        longer = build_g(self.eps, self.alpha, self.w, K=4 * K)
        self.assertLessEqual(longer.mass_beyond(K * self.eps), g.tail_bound)
        self.assertLessEqual(longer.mass_beyond((K + 1) * self.eps), g.tail_bound)
        self.assertLessEqual(g.tail_bound, 1e-6 * g.l1_norm() * (1 + 1e-9))

    def test_truncation_below_minimum(self):
        with self.assertRaises(ArgumentError):
            build_g(self.eps, self.alpha, self.w, K=minimum_truncation(self.w, self.eps) - 1)

    def test_truncation_too_short_for_tolerance(self):
        needed = build_g(self.eps, self.alpha, self.w).truncation_K
        with self.assertRaises(ResourceError) as ctx:
            build_g(self.eps, self.alpha, self.w, K=minimum_truncation(self.w, self.eps))
        self.assertEqual(ctx.exception.required, needed)

    @override_settings(SHIFTROBUST={'MAX_ATOMS': 100})
    def test_atom_cap(self):
        with self.assertRaises(ResourceError):
            build_g(self.eps, self.alpha, self.w)


class JordanSplitTests(SimpleTestCase):

    def test_zero_measure(self):
        q0, q1 = jordan_split(SignedAtomicMeasure.zero())
        self.assertEqual(q0, SignedAtomicMeasure.dirac(0.0, 1.0))
        self.assertEqual(q1, SignedAtomicMeasure.dirac(0.0, 1.0))

    def test_two_atom_split(self):
        g = SignedAtomicMeasure([-1.0, 1.0], [-0.4, 0.4])
        q0, q1 = jordan_split(g)
        self.assertEqual(q0.atoms, [(-1.0, 0.4), (0.0, 0.6)])
        self.assertEqual(q1.atoms, [(0.0, 0.6), (1.0, 0.4)])
        self.assertEqual(q0 - q1, -g)

    def test_too_much_mass(self):
        g = SignedAtomicMeasure([-1.0, 1.0], [-1.5, 1.5])
        with self.assertRaises(InfeasibleError) as ctx:
            jordan_split(g)
        self.assertIn('smaller w', str(ctx.exception))


class AtomicCfTests(SimpleTestCase):

    def test_dirac_at_origin(self):
        for omega in (0.0, 0.3, 17.0):
            self.assertEqual(atomic_cf(SignedAtomicMeasure.dirac(), omega), 1.0)

    def test_symmetric_pair(self):
        eps = 0.2
        pair = SignedAtomicMeasure([-eps / 2, eps / 2], [-1.0, 1.0])
        for omega in np.linspace(-7, 7, 15):
            expected = 2j * math.sin(math.pi * eps * omega)
            self.assertAlmostEqual(abs(atomic_cf(pair, omega) - expected), 0.0, places=12)

    def test_g_transform_is_windowed_shift_difference(self):
        eps, alpha, w = 0.2, 0.3, 0.45
        g = build_g(eps, alpha, w)
        rng = np.random.default_rng(10)
        for omega in rng.uniform(-3 / eps, 3 / eps, size=50):
            shift = math.pi * eps * omega
            f_hat = (1 - alpha) * (np.exp(1j * shift) - np.exp(-1j * shift)) / alpha
            expected = f_hat * periodized_window(w, eps, omega)
            self.assertLessEqual(abs(atomic_cf(g, omega) - expected), g.tail_bound + 1e-12)


class HardInstanceTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.instance = build_instance(GAUSSIAN, 0.2, 0.3)

    def test_frontier_is_tight(self):
        c = self.instance.c
        self.assertLessEqual(self.instance.g.l1_norm(), 2.0)
        self.assertGreater(c, 0.1)
        self.assertLess(c, 1 / (4 * 0.3))
        self.assertGreater(g_l1_at(0.2, 0.3, 1.02 * c), 2.0)

    def test_adversaries_are_probability_measures(self):
        for q in (self.instance.Q0, self.instance.Q1):
            self.assertTrue(np.all(q.weights > 0))
            self.assertAlmostEqual(q.total_mass(), 1.0, delta=1e-10)
        self.assertEqual(self.instance.Q0 - self.instance.Q1, -self.instance.g)

    def test_telescoping_at_frontier(self):
        g = self.instance.g
        edge = boundary_terms(0.2, 0.3, self.instance.w, g.truncation_K)
        self.assertLessEqual(abs(g.total_mass()), 1e-10 + edge)

    def test_difference_vanishes_on_bands(self):
        inst = self.instance
        rng = np.random.default_rng(11)
        ks = rng.integers(-10, 11, size=200)
        offsets = rng.uniform(-inst.w, inst.w, size=200)
        probes = ks / inst.epsilon + offsets
        values = np.abs(delta_phi_E(inst, probes))
        self.assertLessEqual(values.max(), 10 * inst.g.tail_bound)
        for k in range(-5, 6):
            self.assertLessEqual(abs(delta_phi_E(inst, k / inst.epsilon)), 10 * inst.g.tail_bound)

    def test_gap_centers(self):
        inst = self.instance
        for k in range(-3, 3):
            value = abs(delta_phi_E(inst, (k + 0.5) / inst.epsilon))
            self.assertLessEqual(value, 2.0)
            self.assertAlmostEqual(value, 2 * (1 - inst.alpha), delta=1e-4)

    def test_json_payload(self):
        payload = self.instance.to_json(include_atoms=False)
        self.assertAlmostEqual(payload['m'], self.instance.g.l1_norm() / 2)
        self.assertEqual(payload['base'], {'kind': 'gaussian', 'd': 1, 'm': 1})
        self.assertNotIn('g', payload)

    def test_infeasible_c(self):
        with self.assertRaises(InfeasibleError) as ctx:
            build_instance(GAUSSIAN, 0.2, 0.3, c=0.8)
        self.assertIn('largest feasible c', str(ctx.exception))

    def test_overlapping_bands(self):
        with self.assertRaises(InfeasibleError):
            build_instance(GAUSSIAN, 0.2, 0.3, c=1.0)

    def test_multivariate_base_rejected(self):
        with self.assertRaises(UnsupportedError):
            build_instance(BaseDistribution.gaussian(2), 0.2, 0.3)

    def test_frontier_validation(self):
        with self.assertRaises(ArgumentError):
            feasibility_frontier(0.2, 0.5)

    def test_form_validation(self):
        params = instance_params_from_payload({'epsilon': 0.2, 'alpha': 0.3})
        self.assertEqual(params, {'epsilon': 0.2, 'alpha': 0.3, 'c': None, 'K': None})
        with self.assertRaises(ValidationError):
            instance_params_from_payload({'epsilon': 0.0, 'alpha': 0.3})


class TotalVariationTests(SimpleTestCase):

    def test_identical_mixtures(self):
        dirac = SignedAtomicMeasure.dirac(0.3)
        self.assertEqual(mixture_tv(GAUSSIAN, dirac, dirac), (0.0, 0.0))

    def test_shifted_gaussians(self):
        tv, error = mixture_tv(
            GAUSSIAN, SignedAtomicMeasure.dirac(0.5), SignedAtomicMeasure.dirac(-0.5),
        )
        self.assertAlmostEqual(tv, float(special.erf(0.5 / math.sqrt(2))), delta=1e-7)
        self.assertAlmostEqual(tv, 0.38292, places=5)
        self.assertLess(error, 1e-6)

    def test_shifted_uniforms(self):
        tv, _ = mixture_tv(
            BaseDistribution.uniform(),
            SignedAtomicMeasure.dirac(0.5), SignedAtomicMeasure.dirac(-0.5),
        )
        self.assertAlmostEqual(tv, 0.5, places=8)

    def test_fourier_bound_dominates_direct(self):
        for base in (GAUSSIAN, LAPLACE):
            for eps in TV_EPSILONS[base.kind]:
                report = tv_distance(build_instance(base, eps, TV_ALPHA))
                msg = (base.label, eps)
                self.assertLess(report.fourier_bound_raw, 1.0, msg=msg)
                self.assertEqual(report.fourier_bound, report.fourier_bound_raw, msg=msg)
                self.assertLessEqual(report.direct, report.fourier_bound_raw, msg=msg)
                self.assertLess(report.direct_error, 1e-4)

    def test_clipped_bound_keeps_raw_value(self):
        report = tv_distance(build_instance(LAPLACE, 1.0, 0.3))
        self.assertEqual(report.fourier_bound, min(report.fourier_bound_raw, 1.0))
        self.assertLessEqual(report.direct, report.fourier_bound_raw)
        self.assertEqual(report.to_json()['tv_fourier_bound_raw'], report.fourier_bound_raw)

    def test_tv_decreases_with_alpha_over_eps(self):
        values = [tv_distance(build_instance(GAUSSIAN, eps, 0.3)).direct for eps in (1.0, 0.6, 0.4, 0.3)]
        for earlier, later in zip(values, values[1:]):
            self.assertLess(later, earlier)

    def test_report_payload(self):
        report = tv_distance(build_instance(GAUSSIAN, 0.2, 0.3))
        payload = report.to_json()
        self.assertEqual(payload['sample_lower_bound'], report.sample_lower_bound)
        self.assertGreater(report.best_R, 0)
        fourier = fourier_tv_bound(build_instance(GAUSSIAN, 0.2, 0.3))
        self.assertAlmostEqual(fourier.bound, report.fourier_bound)
        self.assertAlmostEqual(fourier.raw, payload['tv_fourier_bound_raw'])
        self.assertAlmostEqual(fourier.band_l2, report.band_l2)


class SampleLowerBoundTests(SimpleTestCase):

    def test_values(self):
        self.assertEqual(sample_lower_bound_from_tv(0.5), 1)
        self.assertEqual(sample_lower_bound_from_tv(math.log(1.5) / 100), 100)
        self.assertEqual(sample_lower_bound_from_tv(1.0), 1)
        self.assertEqual(sample_lower_bound_from_tv(0.999999), 1)

    def test_zero_tv_is_unbounded(self):
        self.assertEqual(sample_lower_bound_from_tv(0.0), math.inf)

    def test_out_of_range(self):
        for tv in (-0.1, 1.5):
            with self.assertRaises(ArgumentError):
                sample_lower_bound_from_tv(tv)

    def test_rate(self):
        self.assertAlmostEqual(lower_bound_rate(1.0, 1.0, 1.0, 1.0), 0.5)
        self.assertEqual(lower_bound_rate(0.0, 1.0, 0.2, 0.3), math.inf)
        with self.assertRaises(ArgumentError):
            lower_bound_rate(0.1, 0.0, 0.2, 0.3)

    def test_preset_grows_as_eps_shrinks(self):
        coarse = lower_bound_preset(GAUSSIAN, 0.6, 0.3)
        fine = lower_bound_preset(GAUSSIAN, 0.3, 0.3)
        self.assertAlmostEqual(coarse['sigma'], math.sqrt(2 / math.pi))
        self.assertLess(fine['delta'], coarse['delta'])
        self.assertGreater(fine['rate'], coarse['rate'])
