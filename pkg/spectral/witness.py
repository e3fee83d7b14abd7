"""
==============================================================================
SPECTRAL APP - FREQUENCY WITNESSES
==============================================================================
A frequency omega is a witness for a mean error v at thresholds (A, delta)
when

    |sin(pi v.omega)| >= A   and   |phi_D(omega)| >= delta.

Any omega with |phi_D(omega)| >= delta has norm at most
B_delta = sqrt(d) M1 / (2 pi delta), so witnesses can be searched for on a
finite cover of that ball.

Search order in find_witness:
    1. analytic candidate for the kind
         Gaussian / Laplace: omega = (arcsin(A) / pi) v / |v|^2
         Uniform kinds:      best |phi_D| on the first lobe
                             [a/|v|, (1 - a)/|v|], a = arcsin(A)/pi
    2. grid scan (largest |phi_D| among qualifying grid points)

Author: ShiftRobust Development Team
==============================================================================
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.conf import get_setting
from core.exceptions import ArgumentError
from core.numerics import as_vector
from distributions.base import DistributionKind

logger = logging.getLogger(__name__)

# Relative slack when re-checking a candidate against its thresholds
CHECK_SLACK = 1e-12


@dataclass(frozen=True)
class WitnessResult:
    omega: Optional[np.ndarray]
    sin_value: float
    cf_magnitude: float
    source: Optional[str] = None

    @property
    def found(self):
        return self.omega is not None

    def to_json(self):
        return {
            'omega': None if self.omega is None else self.omega.tolist(),
            'sin_value': self.sin_value,
            'cf_magnitude': self.cf_magnitude,
            'source': self.source,
        }


NO_WITNESS = WitnessResult(omega=None, sin_value=0.0, cf_magnitude=0.0)


def witness_norm_bound(M1, delta, d):
    """
    B_delta = sqrt(d) M1 / (2 pi delta).

    Args:
        M1: derivative L1 bound of the base density
        delta: CF magnitude threshold
        d: dimension
    """
    if M1 <= 0 or delta <= 0:
        raise ArgumentError(f'M1 and delta must be positive, got M1={M1!r}, delta={delta!r}')
    return math.sqrt(d) * M1 / (2.0 * math.pi * delta)


def _evaluate(dist, v, omega):
    sin_value = abs(math.sin(math.pi * float(np.dot(v, omega))))
    cf_magnitude = float(dist.cf_abs(omega.reshape(1, -1))[0])
    return sin_value, cf_magnitude


def first_lobe(v_norm, A, points):
    """Frequencies along +v spanning the first lobe where |sin(pi |v| t)| >= A."""
    a = math.asin(min(A, 1.0)) / math.pi
    return np.linspace(a / v_norm, (1.0 - a) / v_norm, points)


def analytic_candidate(dist, v, A):
    """The kind-specific constructive witness candidate for error vector v."""
    v_norm = float(np.linalg.norm(v))
    if dist.kind in (DistributionKind.GAUSSIAN, DistributionKind.LAPLACE):
        return (math.asin(min(A, 1.0)) / math.pi) * v / v_norm ** 2

    # 1D uniform kinds: scan the first lobe along the direction of v
    t = first_lobe(v_norm, A, get_setting('WITNESS_SCAN_POINTS'))
    t = t[np.abs(np.sin(np.pi * v_norm * t)) >= A * (1 - CHECK_SLACK)]
    if t.size == 0:
        return None
    magnitudes = dist.cf_abs(t)
    best = t[int(np.argmax(magnitudes))]
    return np.sign(v) * best


def scan_grid_for_witness(dist, v, A, delta, grid):
    """
    Look for a witness among the points of a cover.

    Picks the qualifying point with the largest |phi_D|; among exact ties the
    lexicographically first point wins.

    Returns:
        WitnessResult (NO_WITNESS if no grid point qualifies)
    """
    v = as_vector(v, dist.dimension)
    points = grid.points
    sin_values = np.abs(np.sin(np.pi * (points @ v)))
    magnitudes = dist.cf_abs(points)
    qualifying = (sin_values >= A) & (magnitudes >= delta)
    if not np.any(qualifying):
        return NO_WITNESS
    scores = np.where(qualifying, magnitudes, -np.inf)
    index = int(np.argmax(scores))
    return WitnessResult(
        omega=points[index].copy(),
        sin_value=float(sin_values[index]),
        cf_magnitude=float(magnitudes[index]),
        source='grid',
    )


def find_witness(dist, v, A, delta, grid=None):
    """
    Find a frequency witness for the error vector v.

    Args:
        dist: BaseDistribution
        v: nonzero error vector (length d)
        A: sine threshold in [0, 1]
        delta: CF magnitude threshold (> 0)
        grid: optional Cover of radius >= B_delta for the fallback scan

    Returns:
        WitnessResult; `found` is False when nothing qualifies.
    """
    v = as_vector(v, dist.dimension)
    if not np.linalg.norm(v) > 0:
        raise ArgumentError('v must be nonzero')
    if delta <= 0:
        raise ArgumentError(f'delta must be positive, got {delta!r}')
    if A > 1:
        return NO_WITNESS
    bound = witness_norm_bound(dist.constants.deriv_l1_M1, delta, dist.dimension)
    if grid is not None and grid.radius_R < bound * (1 - CHECK_SLACK):
        raise ArgumentError(
            f'grid radius {grid.radius_R:.6g} is below B_delta = {bound:.6g}'
        )

    if A <= 0:
        return WitnessResult(np.zeros(dist.dimension), 0.0, 1.0, source='trivial')

    candidate = analytic_candidate(dist, v, A)
    if candidate is not None:
        sin_value, cf_magnitude = _evaluate(dist, v, candidate)
        if (sin_value >= A * (1 - CHECK_SLACK) and cf_magnitude >= delta
                and np.linalg.norm(candidate) <= bound):
            return WitnessResult(candidate, sin_value, cf_magnitude, source='analytic')

    if grid is not None:
        result = scan_grid_for_witness(dist, v, A, delta, grid)
        if result.found:
            return result
    logger.debug('No witness for v=%s at A=%.4g, delta=%.4g', v, A, delta)
    return NO_WITNESS
