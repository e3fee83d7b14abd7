"""
==============================================================================
LOWERBOUND APP - FOURIER-MATCHING CONSTRUCTION
==============================================================================
Two hypotheses whose clean means differ by eps but whose characteristic
functions agree on the bands |omega - k/eps| <= w:

    E0 = (1 - alpha) delta_{+eps/2} + alpha Q0
    E1 = (1 - alpha) delta_{-eps/2} + alpha Q1,     P_j = D * E_j

The signed measure

    g = (1 - alpha)(eps/alpha) sum_k (b_w(k eps) - b_w((k+1) eps)) delta_{(k + 1/2) eps}

has g_hat = ((1 - alpha)/alpha)(e^{pi i eps w} - e^{-pi i eps w}) rho_hat_w,
so splitting it as Q0 - Q1 = -g cancels the clean difference wherever the
periodized window rho_hat_w equals one.

Author: ShiftRobust Development Team
==============================================================================
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.conf import get_setting
from core.exceptions import ArgumentError, InfeasibleError, ResourceError, UnsupportedError
from distributions.base import BaseDistribution
from lowerbound.measures import SignedAtomicMeasure, atomic_cf
from lowerbound.window import check_band_separation, window_derivative_tail, window_time

logger = logging.getLogger(__name__)

# Largest L1 norm of g that still leaves room for the (1 - m) delta_0 atom
MAX_G_L1 = 2.0

FRONTIER_ITERATIONS = 40


@dataclass(frozen=True, eq=False)
class HardInstance:
    epsilon: float
    alpha: float
    c: float
    w: float
    g: SignedAtomicMeasure
    Q0: SignedAtomicMeasure
    Q1: SignedAtomicMeasure
    base: BaseDistribution

    @property
    def m(self):
        return self.g.l1_norm() / 2.0

    @property
    def band_halfwidth(self):
        """c alpha, the half-width of the matched bands in eps-scaled frequency."""
        return self.c * self.alpha

    def hypotheses(self):
        """The two mixing measures (E0, E1)."""
        half = self.epsilon / 2.0
        clean = 1.0 - self.alpha
        e0 = SignedAtomicMeasure.dirac(half, clean) + self.Q0.scaled(self.alpha)
        e1 = SignedAtomicMeasure.dirac(-half, clean) + self.Q1.scaled(self.alpha)
        return e0, e1

    def to_json(self, include_atoms=True):
        payload = {
            'epsilon': self.epsilon,
            'alpha': self.alpha,
            'c': self.c,
            'w': self.w,
            'm': self.m,
            'base': self.base.to_json(),
            'truncation_K': self.g.truncation_K,
            'tail_bound': self.g.tail_bound,
            'g_total_mass': self.g.total_mass(),
            'g_l1_norm': self.g.l1_norm(),
        }
        if include_atoms:
            payload['g'] = self.g.to_json()
            payload['Q0'] = self.Q0.to_json()
            payload['Q1'] = self.Q1.to_json()
        return payload


# =============================================================================
# g AND ITS TRUNCATION
# =============================================================================

def minimum_truncation(w, epsilon):
    return int(math.ceil(2.0 / (w * epsilon)))


def g_tail_bound(epsilon, alpha, w, K):
    """L1 mass of the atoms of g dropped by truncating at index K."""
    return (1.0 - alpha) * (epsilon / alpha) * window_derivative_tail(w, K * epsilon)


def _g_atoms(epsilon, alpha, w, K):
    k = np.arange(-K - 1, K + 1, dtype=float)
    weights = (1.0 - alpha) * (epsilon / alpha) * (
        np.asarray(window_time(w, k * epsilon)) - np.asarray(window_time(w, (k + 1.0) * epsilon))
    )
    return (k + 0.5) * epsilon, weights


def required_truncation(epsilon, alpha, w, target):
    """Smallest K >= ceil(2 / (w eps)) whose tail bound is <= target."""
    low = minimum_truncation(w, epsilon)
    if g_tail_bound(epsilon, alpha, w, low) <= target:
        return low
    high = low
    while g_tail_bound(epsilon, alpha, w, high) > target:
        low, high = high, high * 2
    while high - low > 1:
        mid = (low + high) // 2
        if g_tail_bound(epsilon, alpha, w, mid) <= target:
            high = mid
        else:
            low = mid
    return high


def build_g(epsilon, alpha, w, K=None):
    """
    The atomic signed measure g, truncated to indices k in [-K-1, K].

    Args:
        epsilon, alpha: separation and contamination rate (both > 0)
        w: window half-width
        K: truncation index (default: the smallest K whose tail bound is
            at most TAIL_RELATIVE_TOL times the L1 norm of g)

    Returns:
        SignedAtomicMeasure with truncation_K and the certified tail_bound

    Raises:
        ArgumentError: K below 2 / (w eps)
        ResourceError: the needed K exceeds MAX_ATOMS or an explicit K
            leaves a tail above tolerance (the required K is attached)
    """
    if not (epsilon > 0 and alpha > 0 and w > 0):
        raise ArgumentError('epsilon, alpha and w must be positive')
    floor_K = minimum_truncation(w, epsilon)
    relative_tol = get_setting('TAIL_RELATIVE_TOL')
    max_atoms = get_setting('MAX_ATOMS')

    _, provisional = _g_atoms(epsilon, alpha, w, floor_K)
    target = relative_tol * float(np.sum(np.abs(provisional)))
    needed = required_truncation(epsilon, alpha, w, target)

    if K is None:
        K = needed
    elif K < floor_K:
        raise ArgumentError(f'K={K} is below the minimum truncation ceil(2/(w eps)) = {floor_K}')
    elif K < needed:
        raise ResourceError(
            f'K={K} leaves a tail bound of {g_tail_bound(epsilon, alpha, w, K):.3g}; '
            f'K={needed} is needed',
            required=needed,
        )
    if 2 * K + 2 > max_atoms:
        raise ResourceError(
            f'g would need {2 * K + 2} atoms (K={K}), above MAX_ATOMS={max_atoms}',
            required=K,
            hint='raise MAX_ATOMS or TAIL_RELATIVE_TOL',
        )

    locations, weights = _g_atoms(epsilon, alpha, w, K)
    keep = weights != 0
    tail = g_tail_bound(epsilon, alpha, w, K)
    logger.debug('build_g: eps=%.4g alpha=%.4g w=%.4g K=%d tail=%.3g', epsilon, alpha, w, K, tail)
    return SignedAtomicMeasure(locations[keep], weights[keep], truncation_K=int(K), tail_bound=tail)


def boundary_terms(epsilon, alpha, w, K):
    """|b_w(-(K+1) eps)| + |b_w((K+1) eps)|, scaled like the weights of g."""
    edge = abs(window_time(w, (K + 1) * epsilon))
    return 2.0 * (1.0 - alpha) * (epsilon / alpha) * edge


# =============================================================================
# ADVERSARY PAIR
# =============================================================================

def jordan_split(g):
    """
    Q0 = g_minus + (1 - m) delta_0,  Q1 = g_plus + (1 - m) delta_0,  m = |g|_1 / 2.

    Requires |g|_1 <= 2 so both are probability measures whenever g has
    zero total mass.

    Raises:
        InfeasibleError: |g|_1 > 2
    """
    l1 = g.l1_norm()
    if l1 > MAX_G_L1 * (1 + 1e-12):
        raise InfeasibleError(
            f'l1_norm(g) = {l1:.6g} exceeds 2; Q0 and Q1 cannot be probability measures',
            hint='use a smaller w (see the feasibility frontier for the largest c)',
        )
    rest = SignedAtomicMeasure.dirac(0.0, 1.0 - l1 / 2.0) if l1 < MAX_G_L1 else SignedAtomicMeasure.zero()
    negative = g.negative_part()
    positive = g.positive_part()
    q0 = negative + rest
    q1 = positive + rest
    return (
        SignedAtomicMeasure(q0.locations, q0.weights, g.truncation_K, g.tail_bound),
        SignedAtomicMeasure(q1.locations, q1.weights, g.truncation_K, g.tail_bound),
    )


def g_l1_at(epsilon, alpha, c):
    w = c * alpha / epsilon
    return build_g(epsilon, alpha, w).l1_norm()


def feasibility_frontier(epsilon, alpha, *, iterations=FRONTIER_ITERATIONS):
    """
    Largest c in (0, min(1, 1/(4 alpha))] with l1_norm(g) <= 2 at w = c alpha / eps.

    The upper end keeps bands from overlapping; the search is a bisection on
    c (l1_norm(g) grows with c).
    """
    if not (epsilon > 0 and 0 < alpha < 0.5):
        raise ArgumentError('epsilon must be positive and alpha in (0, 1/2)')
    high = min(1.0, 1.0 / (4.0 * alpha))
    if g_l1_at(epsilon, alpha, high) <= MAX_G_L1:
        return high
    low = 0.0
    for _ in range(iterations):
        mid = 0.5 * (low + high)
        if g_l1_at(epsilon, alpha, mid) <= MAX_G_L1:
            low = mid
        else:
            high = mid
    logger.debug('feasibility_frontier(eps=%.4g, alpha=%.4g) = %.6f', epsilon, alpha, low)
    if low == 0.0:
        raise InfeasibleError(f'No feasible c found for eps={epsilon}, alpha={alpha}')
    return low


def build_instance(base, epsilon, alpha, c=None, K=None):
    """
    Assemble the hard pair for a 1D base distribution.

    Args:
        base: BaseDistribution (1D)
        epsilon, alpha: mean separation and contamination rate
        c: band constant (default: the feasibility frontier)
        K: truncation index for g (default per build_g)

    Raises:
        UnsupportedError: multivariate base
        InfeasibleError: bands overlap or l1_norm(g) > 2
    """
    if base.dimension != 1:
        raise UnsupportedError('the lower-bound construction is one-dimensional')
    if not 0 < alpha < 0.5:
        raise ArgumentError(f'alpha must lie in (0, 1/2), got {alpha!r}')
    if c is None:
        c = feasibility_frontier(epsilon, alpha)
    if not c > 0:
        raise ArgumentError(f'c must be positive, got {c!r}')
    w = c * alpha / epsilon
    check_band_separation(w, epsilon)
    g = build_g(epsilon, alpha, w, K)
    try:
        q0, q1 = jordan_split(g)
    except InfeasibleError as exc:
        raise InfeasibleError(
            f'c={c:.6g} is infeasible: {exc}',
            hint=f'largest feasible c is about {feasibility_frontier(epsilon, alpha):.4f}',
        ) from exc
    return HardInstance(float(epsilon), float(alpha), float(c), float(w), g, q0, q1, base)


def delta_phi_E(instance, omega):
    """
    phi_E0 - phi_E1 = (1 - alpha)(e^{pi i eps w} - e^{-pi i eps w}) + alpha (phi_Q0 - phi_Q1).
    """
    omega = np.asarray(omega, dtype=float)
    shift = math.pi * instance.epsilon * omega
    clean = (1.0 - instance.alpha) * (np.exp(1j * shift) - np.exp(-1j * shift))
    adversarial = instance.alpha * (
        np.asarray(atomic_cf(instance.Q0, omega)) - np.asarray(atomic_cf(instance.Q1, omega))
    )
    out = clean + adversarial
    return complex(out) if out.ndim == 0 else out
