"""
==============================================================================
DISTRIBUTIONS APP - BASE DISTRIBUTIONS
==============================================================================
Analytic base distributions D used by the estimator and the lower-bound
construction.

Each distribution provides:
    1. Its characteristic function phi(w) = E[exp(2 pi i w.x)]
    2. A pointwise density (1D kinds)
    3. A seeded sampler
    4. Regularity constants (Lipschitz L of phi, derivative L1 bound M1,
       tail constant sigma)

Kinds:
    - Gaussian(d):      standard normal, phi = exp(-2 pi^2 |w|^2)
    - Laplace(d):       unit variance per coordinate (scale 1/sqrt(2)),
                        phi = prod (1 + 2 pi^2 w_j^2)^-1
    - Uniform1D:        Uniform[-1, 1], phi = sinc(2w)
    - UniformConv(m):   sum of m Uniform[-1, 1], phi = sinc(2w)^m

Author: ShiftRobust Development Team
==============================================================================
"""

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from django.db import models
from scipy import optimize, special

from core.exceptions import ArgumentError, UnsupportedError
from core.numerics import as_generator, as_points, sinc
from distributions.irwin_hall import irwin_hall_breakpoints, irwin_hall_cdf, irwin_hall_pdf


# =============================================================================
# CONSTANTS
# =============================================================================

LAPLACE_SCALE = 1.0 / math.sqrt(2.0)

# Gaussian: sup_t 4 pi^2 t exp(-2 pi^2 t^2) is attained at t = 1/(2 pi)
GAUSSIAN_LIPSCHITZ = 2.0 * math.pi * math.exp(-0.5)

# Laplace: sup_t 4 pi^2 t / (1 + 2 pi^2 t^2)^2 per coordinate, at t = 1/(pi sqrt 6)
LAPLACE_COORD_SLOPE = 9.0 * math.pi / (4.0 * math.sqrt(6.0))


class DistributionKind(models.TextChoices):
    GAUSSIAN = 'gaussian', 'Gaussian'
    LAPLACE = 'laplace', 'Laplace (unit variance)'
    UNIFORM = 'uniform', 'Uniform[-1, 1]'
    UNIFORM_CONV = 'uniform_conv', 'Sum of m Uniform[-1, 1]'


ONE_DIMENSIONAL_KINDS = {DistributionKind.UNIFORM, DistributionKind.UNIFORM_CONV}


@dataclass(frozen=True)
class RegularityConstants:
    """
    Constants consumed by the upper and lower bounds.

    Attributes:
        lipschitz_L: Lipschitz constant of phi_D (on the radius in use)
        deriv_l1_M1: max over coordinates of the L1 norm of d p_D / d x_j
        tail_sigma: constant with Pr[|x| >= R] <= sigma / R
    """
    lipschitz_L: float
    deriv_l1_M1: float
    tail_sigma: float

    def __post_init__(self):
        for name in ('lipschitz_L', 'deriv_l1_M1', 'tail_sigma'):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ArgumentError(f'{name} must be positive and finite, got {value!r}')

    def as_dict(self):
        return {
            'lipschitz_L': self.lipschitz_L,
            'deriv_l1_M1': self.deriv_l1_M1,
            'tail_sigma': self.tail_sigma,
        }


@lru_cache(maxsize=None)
def sinc_slope_sup():
    """sup_t |d/dt (sin t / t)|, attained near t = 2.08."""
    def slope(t):
        return (t * math.cos(t) - math.sin(t)) / (t * t)

    result = optimize.minimize_scalar(
        lambda t: -abs(slope(t)), bounds=(1.0, 3.0), method='bounded',
        options={'xatol': 1e-12},
    )
    return abs(slope(result.x))


def preset_constants(kind, *, d=1, m=1, radius=None):
    """
    Regularity constants for a distribution kind.

    Args:
        kind: A DistributionKind value.
        d: Dimension (Gaussian / Laplace).
        m: Number of summands (UniformConv).
        radius: Frequency radius on which the Lipschitz bound must hold.
            Only the Laplace bound depends on it (2 pi^2 radius); without a
            radius the global per-coordinate bound is used instead.

    Returns:
        RegularityConstants
    """
    kind = DistributionKind(kind)
    if kind == DistributionKind.GAUSSIAN:
        return RegularityConstants(
            lipschitz_L=GAUSSIAN_LIPSCHITZ,
            deriv_l1_M1=math.sqrt(2.0 / math.pi),
            tail_sigma=math.sqrt(2.0 / math.pi),
        )
    if kind == DistributionKind.LAPLACE:
        if radius is not None:
            lipschitz = 2.0 * math.pi ** 2 * float(radius)
        else:
            lipschitz = math.sqrt(d) * LAPLACE_COORD_SLOPE
        return RegularityConstants(
            lipschitz_L=lipschitz,
            deriv_l1_M1=math.sqrt(2.0),
            tail_sigma=1.0,
        )
    if kind == DistributionKind.UNIFORM:
        return RegularityConstants(
            lipschitz_L=2.0 * math.pi * sinc_slope_sup(),
            deriv_l1_M1=1.0,
            tail_sigma=1.0,
        )
    # The m-fold density is symmetric and unimodal, so ||p'||_1 = 2 p(0)
    return RegularityConstants(
        lipschitz_L=m * 2.0 * math.pi * sinc_slope_sup(),
        deriv_l1_M1=2.0 * irwin_hall_pdf(0.0, m),
        tail_sigma=math.sqrt(m / 3.0),
    )


# =============================================================================
# BASE DISTRIBUTION
# =============================================================================

@dataclass(frozen=True)
class BaseDistribution:
    """
    An analytic base distribution D.

    Instances are immutable; every method is pure except `sample`, which
    consumes the RNG it is given.
    """
    kind: str
    dimension: int = 1
    m: int = 1

    def __post_init__(self):
        try:
            kind = DistributionKind(self.kind)
        except ValueError as exc:
            raise ArgumentError(f'Unknown distribution kind: {self.kind!r}') from exc
        object.__setattr__(self, 'kind', kind)
        if not isinstance(self.dimension, (int, np.integer)) or self.dimension < 1:
            raise ArgumentError(f'dimension must be a positive integer, got {self.dimension!r}')
        if kind in ONE_DIMENSIONAL_KINDS and self.dimension != 1:
            raise ArgumentError(f'{kind.label} is one-dimensional; got d={self.dimension}')
        if kind == DistributionKind.UNIFORM_CONV:
            if not isinstance(self.m, (int, np.integer)) or self.m < 1:
                raise ArgumentError(f'UniformConv needs m >= 1, got {self.m!r}')
        else:
            object.__setattr__(self, 'm', 1)

    # -------------------------------------------------------------------------
    # Constructors
    # -------------------------------------------------------------------------

    @classmethod
    def gaussian(cls, d=1):
        return cls(DistributionKind.GAUSSIAN, d)

    @classmethod
    def laplace(cls, d=1):
        return cls(DistributionKind.LAPLACE, d)

    @classmethod
    def uniform(cls):
        return cls(DistributionKind.UNIFORM, 1)

    @classmethod
    def uniform_conv(cls, m):
        return cls(DistributionKind.UNIFORM_CONV, 1, m)

    @classmethod
    def from_json(cls, payload):
        """Build from {"kind": ..., "d": int, "m": int}."""
        return cls(payload['kind'], int(payload.get('d', 1)), int(payload.get('m', 1)))

    def to_json(self):
        return {'kind': self.kind.value, 'd': self.dimension, 'm': self.m}

    @property
    def label(self):
        if self.kind == DistributionKind.UNIFORM_CONV:
            return f'uniform_conv({self.m})'
        return self.kind.value

    @property
    def is_one_dimensional(self):
        return self.dimension == 1

    @cached_property
    def constants(self):
        return preset_constants(self.kind, d=self.dimension, m=self.m)

    # -------------------------------------------------------------------------
    # Characteristic function
    # -------------------------------------------------------------------------

    def cf(self, omega):
        """
        Characteristic function phi_D(omega) = E[exp(2 pi i omega.x)].

        Args:
            omega: One frequency (length-d vector, or a scalar when d = 1) or
                a batch of shape (k, d). For d = 1 a flat array is a batch.

        Returns:
            complex for a single frequency, complex array (k,) for a batch.

        Raises:
            ArgumentError: If the frequency dimension does not match.
        """
        single = np.ndim(omega) == 0 or (np.ndim(omega) == 1 and self.dimension > 1)
        freqs = as_points(omega, self.dimension)
        if not np.all(np.isfinite(freqs)):
            raise ArgumentError('Frequencies must be finite')
        values = self._cf_magnitude(freqs).astype(complex)
        return complex(values[0]) if single else values

    def cf_abs(self, omega):
        """|phi_D| for a batch of frequencies (all preset CFs are real)."""
        freqs = as_points(omega, self.dimension)
        return np.abs(self._cf_magnitude(freqs))

    def _cf_magnitude(self, freqs):
        # All preset CFs are real-valued (symmetric densities)
        if self.kind == DistributionKind.GAUSSIAN:
            return np.exp(-2.0 * math.pi ** 2 * np.sum(freqs ** 2, axis=1))
        if self.kind == DistributionKind.LAPLACE:
            return np.prod(1.0 / (1.0 + 2.0 * math.pi ** 2 * freqs ** 2), axis=1)
        base = np.asarray(sinc(2.0 * freqs[:, 0]), dtype=float)
        if self.kind == DistributionKind.UNIFORM:
            return base
        return base ** self.m

    # -------------------------------------------------------------------------
    # Density and tails (1D kinds)
    # -------------------------------------------------------------------------

    def _require_1d(self, what):
        if self.dimension != 1:
            raise UnsupportedError(f'{what} is only available for 1D distributions')

    def density(self, x):
        """
        Pointwise density p_D(x), vectorized over x (1D only).

        Raises:
            UnsupportedError: For multivariate kinds.
        """
        self._require_1d('density')
        x = np.asarray(x, dtype=float)
        if self.kind == DistributionKind.GAUSSIAN:
            out = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        elif self.kind == DistributionKind.LAPLACE:
            out = np.exp(-np.abs(x) / LAPLACE_SCALE) / (2.0 * LAPLACE_SCALE)
        elif self.kind == DistributionKind.UNIFORM:
            out = np.where(np.abs(x) <= 1.0, 0.5, 0.0)
        else:
            out = np.asarray(irwin_hall_pdf(x, self.m))
        return out if out.ndim else float(out)

    def tail_probability(self, r):
        """Exact Pr[|x| > r] for r >= 0 (1D only)."""
        self._require_1d('tail_probability')
        r = max(float(r), 0.0)
        if self.kind == DistributionKind.GAUSSIAN:
            return float(special.erfc(r / math.sqrt(2.0)))
        if self.kind == DistributionKind.LAPLACE:
            return math.exp(-r / LAPLACE_SCALE)
        if self.kind == DistributionKind.UNIFORM:
            return max(0.0, 1.0 - r)
        return 2.0 * float(irwin_hall_cdf(-r, self.m))

    def effective_support(self, mass=1e-12):
        """Radius r with Pr[|x| > r] <= mass (1D only)."""
        self._require_1d('effective_support')
        if self.kind == DistributionKind.GAUSSIAN:
            return float(math.sqrt(2.0) * special.erfcinv(mass))
        if self.kind == DistributionKind.LAPLACE:
            return LAPLACE_SCALE * math.log(1.0 / mass)
        if self.kind == DistributionKind.UNIFORM:
            return 1.0
        return float(self.m)

    def density_kinks(self):
        """Offsets where the density is not smooth (quadrature panel edges)."""
        self._require_1d('density_kinks')
        if self.kind == DistributionKind.GAUSSIAN:
            return np.empty(0)
        if self.kind == DistributionKind.LAPLACE:
            return np.zeros(1)
        if self.kind == DistributionKind.UNIFORM:
            return np.array([-1.0, 1.0])
        return irwin_hall_breakpoints(self.m)

    def cf_sq_tail_bound(self, omega_max):
        """
        Upper bound on the integral of |phi_D|^2 over |omega| > omega_max (1D).
        """
        self._require_1d('cf_sq_tail_bound')
        big = float(omega_max)
        if big <= 0:
            raise ArgumentError('omega_max must be positive')
        if self.kind == DistributionKind.GAUSSIAN:
            return float(special.erfc(2.0 * math.pi * big)) / (2.0 * math.sqrt(math.pi))
        if self.kind == DistributionKind.LAPLACE:
            return 1.0 / (6.0 * math.pi ** 4 * big ** 3)
        if self.kind == DistributionKind.UNIFORM:
            return 1.0 / (2.0 * math.pi ** 2 * big)
        m = self.m
        return 2.0 * (2.0 * math.pi) ** (-2 * m) / ((2 * m - 1) * big ** (2 * m - 1))

    def cf_level_radius(self, level):
        """
        Radius beyond which |phi_D(omega)| < level.

        Returns 0 for level > 1 and infinity for level <= 0.
        """
        if level > 1.0:
            return 0.0
        if level <= 0.0:
            return math.inf
        if self.kind == DistributionKind.GAUSSIAN:
            return math.sqrt(math.log(1.0 / level) / (2.0 * math.pi ** 2))
        if self.kind == DistributionKind.LAPLACE:
            return math.sqrt((1.0 / level - 1.0) / (2.0 * math.pi ** 2))
        if self.kind == DistributionKind.UNIFORM:
            return 1.0 / (2.0 * math.pi * level)
        return 1.0 / (2.0 * math.pi * level ** (1.0 / self.m))

    # -------------------------------------------------------------------------
    # Sampling
    # -------------------------------------------------------------------------

    def sample(self, seed, n):
        """
        Draw n i.i.d. points.

        Args:
            seed: int seed or numpy Generator (consumed in place).
            n: Number of samples (>= 1).

        Returns:
            float array of shape (n, d).
        """
        if n < 1:
            raise ArgumentError(f'n must be >= 1, got {n}')
        rng = as_generator(seed)
        shape = (int(n), self.dimension)
        if self.kind == DistributionKind.GAUSSIAN:
            return rng.standard_normal(shape)
        if self.kind == DistributionKind.LAPLACE:
            return rng.laplace(0.0, LAPLACE_SCALE, size=shape)
        if self.kind == DistributionKind.UNIFORM:
            return rng.uniform(-1.0, 1.0, size=shape)
        return rng.uniform(-1.0, 1.0, size=(int(n), self.m)).sum(axis=1, keepdims=True)
