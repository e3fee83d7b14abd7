"""
==============================================================================
ESTIMATOR APP - CONFIGURATION AND PRESETS
==============================================================================
Parameters of the witness tournament and the per-distribution presets that
instantiate them.

Presets (R = 2 unless given):

    kind          A                    delta
    gaussian      min(4 alpha, 1)      exp(-2 pi^2 |w*|^2),  |w*| = asin(A)/(pi eps)
    laplace       min(4 alpha, 1)      (1 + 2 pi^2 |w*|^2 / d)^-d
    uniform       1/sqrt(2)            eps / (3 pi)
    uniform_conv  1/sqrt(2)            0.9 * witness threshold (numeric)

A is raised to min(1, 1.05 * 2 alpha / (1 - alpha)) when the default leaves
(1 - alpha) A - 2 alpha <= 0.

The desk preset (benchmark sweeps) keeps A but takes delta at the sine level
min(1, 1.5 alpha / (1 - alpha)) and uses eps / 8 candidate spacing.

Author: ShiftRobust Development Team
==============================================================================
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Optional

from django.db import models

from core.conf import get_setting
from core.exceptions import ArgumentError
from distributions.base import DistributionKind, preset_constants
from spectral.hardness import witness_threshold
from spectral.witness import witness_norm_bound

logger = logging.getLogger(__name__)

DEFAULT_RADIUS_R = 2.0
UNIFORM_SINE_THRESHOLD = 1.0 / math.sqrt(2.0)
RAISE_FACTOR = 1.05
CONV_DELTA_FACTOR = 0.9


class CfMode(models.TextChoices):
    ORACLE = 'oracle', 'Analytic phi_D'
    EMPIRICAL = 'empirical', 'phi_D estimated from m clean draws'


@dataclass(frozen=True)
class EstimatorConfig:
    """
    Inputs of the tournament.

    candidate_resolution / frequency_resolution override the default cover
    resolutions eps' and eta; None means use the defaults derived from the
    other fields.
    """
    epsilon: float
    alpha: float
    R: float
    A: float
    delta: float
    L: float
    M1: float
    budget_constant_C: float = 64.0
    cf_mode: str = CfMode.ORACLE
    clean_count_m: Optional[int] = None
    candidate_resolution: Optional[float] = None
    frequency_resolution: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ArgumentError(f'epsilon must lie in (0, 1), got {self.epsilon!r}')
        if not 0.0 < self.alpha < 0.5:
            raise ArgumentError(f'alpha must lie in (0, 1/2), got {self.alpha!r}')
        if not self.R > 1.0:
            raise ArgumentError(f'R must exceed 1, got {self.R!r}')
        if not 0.0 < self.A <= 1.0:
            raise ArgumentError(f'A must lie in (0, 1], got {self.A!r}')
        for name in ('delta', 'L', 'M1', 'budget_constant_C'):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ArgumentError(f'{name} must be positive and finite, got {value!r}')
        if self.margin <= 0:
            raise ArgumentError(
                f'(1 - alpha) A - 2 alpha must be positive, got {self.margin:.4g}',
                hint='raise A or lower alpha',
            )
        try:
            mode = CfMode(self.cf_mode)
        except ValueError as exc:
            raise ArgumentError(f'Unknown cf_mode: {self.cf_mode!r}') from exc
        object.__setattr__(self, 'cf_mode', mode)
        if mode == CfMode.EMPIRICAL and not (self.clean_count_m and self.clean_count_m >= 1):
            raise ArgumentError('empirical cf_mode needs clean_count_m >= 1')
        for name in ('candidate_resolution', 'frequency_resolution'):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ArgumentError(f'{name} must be positive, got {value!r}')

    @property
    def margin(self):
        """(1 - alpha) A - 2 alpha."""
        return (1.0 - self.alpha) * self.A - 2.0 * self.alpha

    @property
    def separation_c(self):
        """Score gap between good and bad candidates, (1 - alpha) A / 2 - alpha."""
        return self.margin / 2.0

    def norm_bound(self, d):
        return witness_norm_bound(self.M1, self.delta, d)

    def candidate_eta(self, d):
        """eps' = min(margin / (4 (1-a) pi B), a / (2 (1-a) pi B), eps)."""
        if self.candidate_resolution is not None:
            return self.candidate_resolution
        scale = (1.0 - self.alpha) * math.pi * self.norm_bound(d)
        return min(self.margin / (4.0 * scale), self.alpha / (2.0 * scale), self.epsilon)

    def frequency_eta(self):
        """eta = min(delta / (2 L), A / (2 pi R))."""
        if self.frequency_resolution is not None:
            return self.frequency_resolution
        return min(self.delta / (2.0 * self.L), self.A / (2.0 * math.pi * self.R))

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_json(self):
        payload = dataclasses.asdict(self)
        payload['cf_mode'] = CfMode(self.cf_mode).value
        return payload

    @classmethod
    def from_json(cls, payload):
        fields = {f.name for f in dataclasses.fields(cls)}
        return cls(**{key: value for key, value in payload.items() if key in fields})


def default_sine_threshold(kind, alpha):
    kind = DistributionKind(kind)
    if kind in (DistributionKind.UNIFORM, DistributionKind.UNIFORM_CONV):
        A = UNIFORM_SINE_THRESHOLD
    else:
        A = min(4.0 * alpha, 1.0)
    if (1.0 - alpha) * A - 2.0 * alpha <= 0:
        A = min(1.0, RAISE_FACTOR * 2.0 * alpha / (1.0 - alpha))
        logger.debug('Raised A to %.4g for alpha=%.4g', A, alpha)
    if (1.0 - alpha) * A - 2.0 * alpha <= 0:
        raise ArgumentError(
            f'No sine threshold A <= 1 gives a positive margin at alpha={alpha:.4g}',
            hint='the tournament needs alpha < 1/3',
        )
    return A


def preset_delta(dist, epsilon, A):
    """CF threshold realized by the constructive witness for |v| = epsilon."""
    kind = dist.kind
    if kind in (DistributionKind.GAUSSIAN, DistributionKind.LAPLACE):
        omega_norm = math.asin(A) / (math.pi * epsilon)
        if kind == DistributionKind.GAUSSIAN:
            return math.exp(-2.0 * math.pi ** 2 * omega_norm ** 2)
        d = dist.dimension
        return (1.0 + 2.0 * math.pi ** 2 * omega_norm ** 2 / d) ** (-d)
    if kind == DistributionKind.UNIFORM and math.isclose(A, UNIFORM_SINE_THRESHOLD):
        return epsilon / (3.0 * math.pi)
    return CONV_DELTA_FACTOR * witness_threshold(dist, epsilon, A)


def preset_config(dist, epsilon, alpha, *, R=DEFAULT_RADIUS_R, A=None, **overrides):
    """
    EstimatorConfig with the corollary parameters for `dist`.

    Args:
        dist: BaseDistribution
        epsilon, alpha: target error and contamination rate
        R: mean-norm bound after pre-centering
        A: sine threshold (default per kind, see module docstring)
        **overrides: any other EstimatorConfig field

    Returns:
        EstimatorConfig
    """
    if A is None:
        A = default_sine_threshold(dist.kind, alpha)
    delta = overrides.pop('delta', None) or preset_delta(dist, epsilon, A)
    M1 = overrides.pop('M1', None) or dist.constants.deriv_l1_M1
    L = overrides.pop('L', None)
    if L is None and dist.kind == DistributionKind.LAPLACE:
        radius = witness_norm_bound(M1, delta, dist.dimension)
        L = preset_constants(dist.kind, d=dist.dimension, radius=radius).lipschitz_L
    elif L is None:
        L = dist.constants.lipschitz_L
    overrides.setdefault('budget_constant_C', get_setting('BUDGET_CONSTANT_C'))
    return EstimatorConfig(
        epsilon=epsilon, alpha=alpha, R=R, A=A, delta=delta, L=L, M1=M1, **overrides
    )


# =============================================================================
# DESK-SCALE PRESETS
# =============================================================================
# The corollary delta collapses like exp(-(alpha/eps)^2) and its covers blow
# past COVER_SIZE_CAP well before the sample counts get interesting. The desk
# preset keeps the tournament and A, but takes delta from the smallest sine
# level at which a point-shift candidate at distance eps still loses,
# 2 (1 - alpha) a - alpha > alpha, and fixes the cover resolutions to a
# fraction of eps and of the witness frequency.

DESK_GAP_FACTOR = 1.5
DESK_GRID_DIVISOR = 8.0


class PresetKind(models.TextChoices):
    THEORY = 'theory', 'Corollary parameters'
    DESK = 'desk', 'Desk-scale calibration'


def desk_sine_threshold(alpha):
    """min(1, 1.5 alpha / (1 - alpha))."""
    if not 0.0 < alpha < 0.5:
        raise ArgumentError(f'alpha must lie in (0, 1/2), got {alpha!r}')
    return min(1.0, DESK_GAP_FACTOR * alpha / (1.0 - alpha))


def desk_preset_config(dist, epsilon, alpha, *, R=DEFAULT_RADIUS_R, A=None, **overrides):
    """
    EstimatorConfig for benchmark sweeps at desk scale.

    delta is the constructive witness magnitude at the desk sine level,
    candidate_resolution is eps / 8 and frequency_resolution is 1/8 of the
    smaller of the witness frequency and 1 / R. Explicit overrides win.
    """
    level = desk_sine_threshold(alpha)
    witness_frequency = math.asin(level) / (math.pi * epsilon)
    overrides.setdefault('delta', preset_delta(dist, epsilon, level))
    overrides.setdefault('candidate_resolution', epsilon / DESK_GRID_DIVISOR)
    overrides.setdefault(
        'frequency_resolution', min(witness_frequency, 1.0 / R) / DESK_GRID_DIVISOR
    )
    logger.debug(
        'Desk preset eps=%.4g alpha=%.4g: sine level %.4g, delta %.4g',
        epsilon, alpha, level, overrides['delta'],
    )
    return preset_config(dist, epsilon, alpha, R=R, A=A, **overrides)


PRESETS = {
    PresetKind.THEORY: preset_config,
    PresetKind.DESK: desk_preset_config,
}
