"""
==============================================================================
LOWERBOUND APP - TOTAL VARIATION BETWEEN THE HARD PAIR
==============================================================================
Two numbers for every HardInstance:

    direct   half the L1 distance between p0 = D * E0 and p1 = D * E1,
             integrated panel by panel with scipy quad
    bound    the Fourier-to-TV bound

                 1/2 |(p0 - p1) 1{|x| > R}|_1 + sqrt(R/2) |phi_D dphi_E|_2

             with the L2 term split into the band complement (|dphi_E| <= 2)
             and the bands (|dphi_E| <= alpha * tail), minimized over R

The direct number never exceeds the bound; tests assert it.

Author: ShiftRobust Development Team
==============================================================================
"""

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from core.conf import get_setting
from core.exceptions import ArgumentError, QuadratureError
from core.numerics import ceil_count
from lowerbound.construction import feasibility_frontier
from spectral.hardness import band_l2_mass

logger = logging.getLogger(__name__)

# Density mass ignored when windowing atoms around a point
SUPPORT_MASS = 1e-13

MAX_PANEL_WIDTH = 0.5
QUAD_LIMIT = 200
MIN_PANEL_GAP = 1e-12

# Geometric grid of truncation radii R for the Fourier bound
BOUND_RADII = np.geomspace(1.0, 1e4, 60)

# Two-point testing: n >= log(3/2) / TV
TESTING_CONSTANT = math.log(1.5)


@dataclass(frozen=True)
class TVReport:
    direct: float
    direct_error: float
    fourier_bound: float
    best_R: float
    band_l2: float
    tail_bound: float
    # Before clipping to 1
    fourier_bound_raw: float = math.nan

    @property
    def sample_lower_bound(self):
        return sample_lower_bound_from_tv(max(self.direct, 0.0))

    def to_json(self):
        bound = self.sample_lower_bound
        return {
            'tv_direct': self.direct,
            'tv_direct_error': self.direct_error,
            'tv_fourier_bound': self.fourier_bound,
            'tv_fourier_bound_raw': self.fourier_bound_raw,
            'best_R': self.best_R,
            'band_l2': self.band_l2,
            'g_tail_bound': self.tail_bound,
            'sample_lower_bound': 'unbounded' if math.isinf(bound) else bound,
        }


# =============================================================================
# DIRECT QUADRATURE
# =============================================================================

def _drop_tiny_atoms(measure, budget):
    """Drop the smallest atoms while their total |weight| stays within budget."""
    magnitudes = np.abs(measure.weights)
    order = np.argsort(magnitudes, kind='stable')
    cumulative = np.cumsum(magnitudes[order])
    n_drop = int(np.searchsorted(cumulative, budget, side='right'))
    keep = np.ones(len(measure), dtype=bool)
    keep[order[:n_drop]] = False
    dropped = float(cumulative[n_drop - 1]) if n_drop else 0.0
    return measure.locations[keep], measure.weights[keep], dropped


def _panel_edges(base, locations, lo, hi):
    kinks = np.asarray(base.density_kinks(), dtype=float)
    edges = [np.linspace(lo, hi, max(2, int(math.ceil((hi - lo) / MAX_PANEL_WIDTH)) + 1))]
    if kinks.size:
        shifted = np.add.outer(locations, kinks).ravel()
        edges.append(shifted[(shifted > lo) & (shifted < hi)])
    edges = np.unique(np.concatenate(edges))
    keep = np.concatenate([[True], np.diff(edges) > MIN_PANEL_GAP])
    return edges[keep]


def mixture_tv(base, e0, e1, *, abs_tol=None):
    """
    Half the L1 distance between D * e0 and D * e1.

    Args:
        base: 1D BaseDistribution with a pointwise density
        e0, e1: SignedAtomicMeasure mixing measures
        abs_tol: per-panel quad tolerance (default QUAD_ABS_TOL)

    Returns:
        (tv, error) where error bounds the quadrature error, the dropped
        atoms and the density mass outside the integration window

    Raises:
        QuadratureError: scipy quad did not converge on some panel
    """
    tol = get_setting('QUAD_ABS_TOL') if abs_tol is None else float(abs_tol)
    diff = e0 - e1
    if len(diff) == 0:
        return 0.0, 0.0

    locations, weights, dropped = _drop_tiny_atoms(diff, tol)
    if locations.size == 0:
        return 0.0, 0.5 * dropped
    l1 = float(np.sum(np.abs(weights)))
    radius = base.effective_support(SUPPORT_MASS)
    lo, hi = float(locations[0]) - radius, float(locations[-1]) + radius

    def integrand(x):
        start = np.searchsorted(locations, x - radius, side='left')
        stop = np.searchsorted(locations, x + radius, side='right')
        near = slice(start, stop)
        return abs(float(np.dot(weights[near], base.density(x - locations[near]))))

    edges = _panel_edges(base, locations, lo, hi)
    total = 0.0
    abserr = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter('error', integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            try:
                value, err = integrate.quad(integrand, a, b, epsabs=tol, limit=QUAD_LIMIT)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(
                    f'quad did not converge on panel [{a:.6g}, {b:.6g}]: {exc}',
                    hint='loosen QUAD_ABS_TOL or use fewer, wider atoms (smaller K)',
                ) from exc
            total += value
            abserr += err

    error = 0.5 * (abserr + dropped + l1 * base.tail_probability(radius))
    logger.debug('mixture_tv: %d atoms, %d panels, tv=%.6g +- %.2g',
                 locations.size, edges.size - 1, 0.5 * total, error)
    return 0.5 * total, error


def direct_tv(instance, *, abs_tol=None):
    e0, e1 = instance.hypotheses()
    return mixture_tv(instance.base, e0, e1, abs_tol=abs_tol)


# =============================================================================
# FOURIER BOUND
# =============================================================================

def density_l2_norm(base):
    """|p_D|_2, which equals |phi_D|_2."""
    radius = base.effective_support(SUPPORT_MASS)
    edges = np.unique(np.concatenate([
        [-radius, radius],
        np.clip(np.asarray(base.density_kinks(), dtype=float), -radius, radius),
    ]))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        value, _ = integrate.quad(lambda x: float(base.density(x)) ** 2, a, b, limit=QUAD_LIMIT)
        total += value
    return math.sqrt(total)


@dataclass(frozen=True)
class FourierBound:
    raw: float
    best_R: float
    band_l2: float

    @property
    def bound(self):
        """The raw bound clipped to 1, the largest TV there is."""
        return min(self.raw, 1.0)


def fourier_tv_bound(instance, *, radii=None, band_l2=None):
    """
    Minimize the Fourier-to-TV bound over R.

    Returns:
        FourierBound; raw is the minimum itself, which may exceed 1
    """
    base = instance.base
    alpha = instance.alpha
    tail = instance.g.tail_bound
    if band_l2 is None:
        band_l2 = band_l2_mass(base, instance.epsilon, instance.band_halfwidth)
    in_band = alpha * tail * density_l2_norm(base)
    e0, e1 = instance.hypotheses()
    diff = e0 - e1
    l1 = diff.l1_norm()

    best, best_R = math.inf, math.nan
    for R in (BOUND_RADII if radii is None else radii):
        half = 0.5 * R
        outside = l1 * base.tail_probability(half) + diff.mass_beyond(half)
        value = 0.5 * outside + math.sqrt(half) * (2.0 * band_l2 + in_band)
        if value < best:
            best, best_R = value, float(R)
    return FourierBound(best, best_R, band_l2)


def tv_distance(instance, *, abs_tol=None):
    """Direct TV with its error bar next to the Fourier bound."""
    direct, error = direct_tv(instance, abs_tol=abs_tol)
    fourier = fourier_tv_bound(instance)
    if direct - error > fourier.raw:
        logger.warning('Direct TV %.6g exceeds the Fourier bound %.6g', direct, fourier.raw)
    return TVReport(
        direct, error, fourier.bound, fourier.best_R, fourier.band_l2, instance.g.tail_bound,
        fourier_bound_raw=fourier.raw,
    )


# =============================================================================
# SAMPLE COMPLEXITY
# =============================================================================

def sample_lower_bound_from_tv(tv):
    """
    ceil(log(3/2) / tv); infinity when tv = 0.

    Raises:
        ArgumentError: tv outside [0, 1]
    """
    if not 0.0 <= tv <= 1.0:
        raise ArgumentError(f'tv must lie in [0, 1], got {tv!r}')
    if tv == 0.0:
        return math.inf
    return max(ceil_count(TESTING_CONSTANT / tv), 1)


def lower_bound_rate(delta, sigma, epsilon, alpha):
    """1 / ((delta sigma)^(1/3) + (eps/alpha)^3 (delta/sigma)^2)."""
    if not (delta >= 0 and sigma > 0 and epsilon > 0 and alpha > 0):
        raise ArgumentError('need delta >= 0 and sigma, epsilon, alpha > 0')
    denominator = (delta * sigma) ** (1.0 / 3.0) + (epsilon / alpha) ** 3 * (delta / sigma) ** 2
    return math.inf if denominator == 0 else 1.0 / denominator


def lower_bound_preset(dist, epsilon, alpha, c=None):
    """delta from band_l2_mass at half-width c alpha and sigma from the base."""
    if c is None:
        c = feasibility_frontier(epsilon, alpha)
    delta = band_l2_mass(dist, epsilon, c * alpha)
    sigma = dist.constants.tail_sigma
    return {
        'c': c,
        'delta': delta,
        'sigma': sigma,
        'rate': lower_bound_rate(delta, sigma, epsilon, alpha),
    }
