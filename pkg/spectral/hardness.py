"""
==============================================================================
SPECTRAL APP - HARDNESS QUANTITIES
==============================================================================
Numerical versions of the two quantities that govern the sample complexity:

    1. delta(eps, alpha, D): the largest CF magnitude a frequency can keep
       while its projection on every admissible error v stays alpha away
       from the integers (inf over |v| >= eps, sup over omega)
    2. the band-restricted L2 mass of phi_D over {dist(eps omega, Z) > c alpha}

plus the L2-from-Linfty check on band sets and the witness threshold used to
pick delta for the UniformConv preset.

Author: ShiftRobust Development Team
==============================================================================
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from core.conf import get_setting
from core.exceptions import ArgumentError, UnsupportedError
from core.numerics import integer_distance
from spectral.covers import sphere_directions
from spectral.witness import first_lobe

logger = logging.getLogger(__name__)

# Constant in the L2 <= K sqrt(Linfty M1) check
L2_LINFTY_K = 4.0

# Squared CF mass we are willing to leave beyond omega_max
TAIL_TARGET = 1e-14

# Hard ceiling on the integration range
OMEGA_MAX_CEILING = 1e4

DIRECTIONS_PER_DIM = {2: 64, 3: 256}


@dataclass(frozen=True)
class DeltaResult:
    value: float
    v: Optional[np.ndarray]
    omega: Optional[np.ndarray]
    empty_feasible_set: bool = False

    def to_json(self):
        return {
            'value': self.value,
            'v': None if self.v is None else self.v.tolist(),
            'omega': None if self.omega is None else self.omega.tolist(),
            'empty_feasible_set': self.empty_feasible_set,
        }


@dataclass(frozen=True)
class BandSet:
    """
    A symmetric frequency set S inside [-omega_max, omega_max].

    kind 'band':  {omega : dist(eps omega, Z) > halfwidth}
    kind 'full':  all of [-omega_max, omega_max]
    kind 'empty': nothing
    """
    kind: str
    omega_max: float = 0.0
    epsilon: float = 1.0
    halfwidth: float = 0.0

    @classmethod
    def band(cls, epsilon, halfwidth, omega_max):
        return cls('band', float(omega_max), float(epsilon), float(halfwidth))

    @classmethod
    def full(cls, omega_max):
        return cls('full', float(omega_max))

    @classmethod
    def empty(cls):
        return cls('empty')

    def intervals(self):
        """Disjoint [a, b] pieces of S on the half line [0, omega_max]."""
        if self.kind == 'empty' or self.omega_max <= 0:
            return []
        if self.kind == 'full':
            return [(0.0, self.omega_max)]
        if self.halfwidth >= 0.5:
            return []
        eps, h = self.epsilon, self.halfwidth
        pieces = []
        for k in range(int(math.ceil(self.omega_max * eps)) + 1):
            a = (k + h) / eps
            b = min((k + 1 - h) / eps, self.omega_max)
            if a < b:
                pieces.append((a, b))
        return pieces


@dataclass(frozen=True)
class L2LinftyResult:
    l2: float
    linfty: float
    ratio: float
    ratio_ok: bool

    def to_json(self):
        return {'l2': self.l2, 'linfty': self.linfty, 'ratio': self.ratio, 'ratio_ok': self.ratio_ok}


def _require_1d(dist, what):
    if dist.dimension != 1:
        raise UnsupportedError(f'{what} is only defined for 1D distributions')


# =============================================================================
# DELTA QUANTITY
# =============================================================================

def default_scan_range(dist, epsilon, alpha):
    """Range [0, omega_max] for the delta scan; always holds the first band gap."""
    reach = min(dist.cf_level_radius(1e-12), 50.0 / epsilon)
    return max(reach, (1.0 - alpha) / epsilon)


def _scan_direction(dist, direction, epsilon, alpha, omega_max, points):
    """Best feasible |phi_D(t u)| for t in [0, omega_max], with v = eps u."""
    t = np.linspace(0.0, omega_max, points)
    # Exact feasibility boundaries t = (k +- alpha)/eps
    ks = np.arange(0, int(math.ceil(omega_max * epsilon)) + 1)
    edges = np.concatenate([(ks + alpha) / epsilon, (ks + 1 - alpha) / epsilon])
    t = np.unique(np.concatenate([t, edges[(edges >= 0) & (edges <= omega_max)]]))
    feasible = integer_distance(t * epsilon) >= alpha * (1 - 1e-12)
    if not np.any(feasible):
        return 0.0, None
    t = t[feasible]
    magnitudes = dist.cf_abs(np.outer(t, direction))
    best = int(np.argmax(magnitudes))
    return float(magnitudes[best]), t[best] * direction


def delta_quantity(dist, epsilon, alpha, *, directions=None, omega_max=None, scan_points=None):
    """
    Approximate delta(eps, alpha, D).

    1D is exact up to scan resolution (v = +-eps are equivalent for the
    symmetric presets). For d >= 2, v ranges over eps times a directional net
    and omega is scanned along the same direction.

    Args:
        dist: BaseDistribution
        epsilon: target error (> 0)
        alpha: contamination rate in (0, 1/2)
        directions: optional (k, d) unit directions (d >= 2)
        omega_max: scan range (default: where |phi_D| drops below 1e-12,
            but never short of the first band gap)
        scan_points: grid points per direction

    Returns:
        DeltaResult with the achieving (v, omega); value 0 and the
        empty_feasible_set flag when no scanned frequency is feasible.
    """
    if epsilon <= 0:
        raise ArgumentError(f'epsilon must be positive, got {epsilon!r}')
    if not 0 <= alpha < 0.5:
        raise ArgumentError(f'alpha must lie in [0, 1/2), got {alpha!r}')
    points = scan_points or get_setting('WITNESS_SCAN_POINTS')
    omega_max = omega_max or default_scan_range(dist, epsilon, alpha)
    d = dist.dimension
    if directions is None:
        directions = sphere_directions(d, DIRECTIONS_PER_DIM.get(d, 1))
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    directions = directions / np.linalg.norm(directions, axis=1, keepdims=True)

    worst = None
    for direction in directions:
        value, omega = _scan_direction(dist, direction, epsilon, alpha, omega_max, points)
        if worst is None or value < worst[0]:
            worst = (value, epsilon * direction, omega)

    value, v, omega = worst
    if omega is None:
        logger.warning(
            'delta scan found no feasible frequency (eps=%.4g, alpha=%.4g, omega_max=%.4g)',
            epsilon, alpha, omega_max,
        )
        return DeltaResult(0.0, v, None, empty_feasible_set=True)
    return DeltaResult(value, v, omega)


def witness_threshold(dist, epsilon, A, *, v_max=None, v_points=400):
    """
    inf over |v| >= eps of the best first-lobe witness magnitude at sine
    threshold A (1D). For |v| beyond v_max the first lobe sits at
    frequencies below (1 - a)/v_max where |phi_D| is close to 1.
    """
    _require_1d(dist, 'witness_threshold')
    if not 0 < A <= 1:
        raise ArgumentError(f'A must lie in (0, 1], got {A!r}')
    v_max = v_max or max(8.0, 10.0 * epsilon)
    lobe_points = get_setting('WITNESS_SCAN_POINTS') // 4
    best = math.inf
    for v in np.linspace(epsilon, v_max, v_points):
        t = first_lobe(v, A, lobe_points)
        best = min(best, float(np.max(dist.cf_abs(t))))
    return best


# =============================================================================
# BAND L2 MASS
# =============================================================================

def _integrate_sq(dist, pieces, step):
    """Integral of |phi_D|^2 over the union of pieces (composite Simpson)."""
    total = 0.0
    for a, b in pieces:
        count = max(3, int(math.ceil((b - a) / step)) + 1)
        if count % 2 == 0:
            count += 1
        x = np.linspace(a, b, count)
        total += simpson(dist.cf_abs(x) ** 2, x=x)
    return total


def default_omega_max(dist, epsilon):
    """Smallest doubling of 1/eps whose squared-CF tail is below TAIL_TARGET."""
    omega_max = max(1.0 / epsilon, 1.0)
    while dist.cf_sq_tail_bound(omega_max) > TAIL_TARGET and omega_max < OMEGA_MAX_CEILING:
        omega_max *= 2.0
    return min(omega_max, OMEGA_MAX_CEILING)


def band_l2_mass(dist, epsilon, band_halfwidth, omega_max=None, quad_step=None):
    """
    L2 norm of phi_D restricted to {omega : dist(eps omega, Z) > band_halfwidth}.

    Integrates |phi_D|^2 on each band gap inside [-omega_max, omega_max] and
    adds the analytic bound on the mass beyond omega_max, so the result is an
    upper bound up to quadrature error.

    Raises:
        ArgumentError: quad_step wider than a band (bands would be skipped).
    """
    _require_1d(dist, 'band_l2_mass')
    if epsilon <= 0:
        raise ArgumentError(f'epsilon must be positive, got {epsilon!r}')
    if band_halfwidth >= 0.5:
        return 0.0
    if band_halfwidth < 0:
        raise ArgumentError('band_halfwidth must be nonnegative')
    band_width = 2.0 * band_halfwidth / epsilon
    gap_width = (1.0 - 2.0 * band_halfwidth) / epsilon
    if quad_step is None:
        quad_step = min(0.01, gap_width / 16.0, band_width if band_width > 0 else math.inf)
    elif band_width > 0 and quad_step > band_width:
        raise ArgumentError(
            f'quad_step={quad_step:.4g} exceeds the band width {band_width:.4g}; bands would be skipped'
        )
    omega_max = omega_max or default_omega_max(dist, epsilon)

    pieces = BandSet.band(epsilon, band_halfwidth, omega_max).intervals()
    mass = 2.0 * _integrate_sq(dist, pieces, quad_step)
    tail = dist.cf_sq_tail_bound(omega_max)
    if tail > TAIL_TARGET:
        logger.info('band_l2_mass: CF tail beyond %.4g is %.3g (kept in the bound)', omega_max, tail)
    return math.sqrt(mass + tail)


# =============================================================================
# L2 FROM LINFTY
# =============================================================================

def l2_linfty_check(dist, band_set, quad_step=0.005):
    """
    Compare ||phi_D 1_S||_2 with sqrt(||phi_D 1_S||_inf * M1).

    Returns:
        L2LinftyResult with ratio_ok = (l2 <= 4 sqrt(linfty M1)).
    """
    _require_1d(dist, 'l2_linfty_check')
    pieces = band_set.intervals()
    if not pieces:
        return L2LinftyResult(0.0, 0.0, 0.0, True)
    l2 = math.sqrt(2.0 * _integrate_sq(dist, pieces, quad_step))
    linfty = 0.0
    for a, b in pieces:
        count = max(3, int(math.ceil((b - a) / quad_step)) + 1)
        linfty = max(linfty, float(np.max(dist.cf_abs(np.linspace(a, b, count)))))
    scale = math.sqrt(linfty * dist.constants.deriv_l1_M1)
    ratio = l2 / scale if scale > 0 else 0.0
    return L2LinftyResult(l2, linfty, ratio, bool(l2 <= L2_LINFTY_K * scale))
