"""
==============================================================================
ESTIMATOR APP - WITNESS TOURNAMENT
==============================================================================
Mean estimation under mean-shift contamination by comparing every candidate
mean against the deconvolved empirical CF on a set of frequencies:

    1. n   <- C d log(B R L / (delta A)) / ((1 - alpha) A - 2 alpha)^2 delta^2
    2. C_mu: eps'-cover of the radius-R ball (around the pre-centering shift)
    3. C_w:  eta-cover of the frequency ball of radius B_delta
    4. S_w = {w in C_w : |phi_D(w)| >= delta / 2}
    5. psi(w) = ecf(w) / phi_D(w) on S_w
    6. T_m(w) = (1 - alpha) exp(2 pi i w.m) - psi(w)
    7. s(m) = max over S_w of |T_m(w)|,  output argmin s

The frequency cover is clipped to the radius where |phi_D| can still reach
the search-set level. The grid lattice does not depend on the radius, so S_w
is the same set of points.

Author: ShiftRobust Development Team
==============================================================================
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.conf import get_setting
from core.exceptions import ArgumentError
from core.numerics import as_points, as_vector, ceil_count
from estimator.config import CfMode
from spectral.covers import build_cover, check_dimension

logger = logging.getLogger(__name__)

# Frequencies per ECF chunk; keeps each (block x chunk) phase matrix small
ECF_FREQ_CHUNK = 64

# Slack subtracted from the search-set level in empirical-CF mode, per 1/sqrt(m)
EMPIRICAL_LEVEL_SLACK = 5.0

PRECENTER_MAX_ALPHA = 1.0 / 3.0


@dataclass
class SearchSet:
    frequencies: np.ndarray
    phi_values: np.ndarray
    level: float

    def __len__(self):
        return self.frequencies.shape[0]

    @property
    def points(self):
        return self.frequencies


@dataclass
class EstimateReport:
    mu_hat: np.ndarray
    score: float
    n_used: int
    search_set_size: int
    candidate_count: int
    per_candidate_scores: Optional[np.ndarray] = None
    candidates: Optional[np.ndarray] = None
    shift: Optional[np.ndarray] = None
    candidate_resolution: float = 0.0
    frequency_resolution: float = 0.0
    frequency_radius: float = 0.0
    witness_norm_bound: float = 0.0
    sample_budget: Optional[int] = None
    warnings: list = field(default_factory=list)

    @property
    def empty_search_set(self):
        return self.search_set_size == 0

    def to_json(self, trace=False):
        payload = {
            'mu_hat': self.mu_hat.tolist(),
            'score': self.score,
            'n_used': self.n_used,
            'search_set_size': self.search_set_size,
            'candidate_count': self.candidate_count,
            'shift': None if self.shift is None else self.shift.tolist(),
            'candidate_resolution': self.candidate_resolution,
            'frequency_resolution': self.frequency_resolution,
            'frequency_radius': self.frequency_radius,
            'witness_norm_bound': self.witness_norm_bound,
            'sample_budget': self.sample_budget,
            'warnings': list(self.warnings),
        }
        if trace and self.per_candidate_scores is not None:
            payload['trace'] = [
                {'candidate': point.tolist(), 'score': float(score)}
                for point, score in zip(self.candidates, self.per_candidate_scores)
            ]
        return payload


# =============================================================================
# BUILDING BLOCKS
# =============================================================================

def precenter(samples, alpha):
    """
    Coordinate-wise median of the samples.

    Within O(sigma) of mu per coordinate as long as fewer than half of the
    points are contaminated; required alpha < 1/3 leaves room for sampling
    noise.
    """
    if alpha >= PRECENTER_MAX_ALPHA:
        raise ArgumentError(f'pre-centering needs alpha < 1/3, got {alpha!r}')
    points = np.asarray(samples, dtype=float)
    if points.size == 0:
        raise ArgumentError('Cannot pre-center an empty sample set')
    points = as_points(points, points.shape[-1] if points.ndim == 2 else 1)
    return np.median(points, axis=0)


def sample_budget(config, d):
    """
    Number of samples the tournament asks for:
    ceil(C d log(B_delta R L / (delta A)) / (margin delta)^2).

    Raises:
        ArgumentError: the log factor is not positive.
    """
    bound = config.norm_bound(d)
    argument = bound * config.R * config.L / (config.delta * config.A)
    if not argument > 1.0:
        raise ArgumentError(
            f'log(B R L / (delta A)) must be positive; argument is {argument:.6g}'
        )
    value = config.budget_constant_C * d * math.log(argument) / (config.margin * config.delta) ** 2
    return ceil_count(value)


def ecf(samples, omega, *, block_size=None):
    """
    Empirical characteristic function (1/n) sum_j exp(2 pi i w.x_j).

    Samples are accumulated in fixed-size blocks and the block sums are
    reduced in order, so the result does not depend on how the work is
    split.

    Args:
        samples: (n, d) array (a flat array is n scalar samples)
        omega: one frequency or a batch (k, d)

    Returns:
        complex for a single frequency, complex (k,) array for a batch.
    """
    points = np.asarray(samples, dtype=float)
    if points.size == 0:
        raise ArgumentError('ecf needs at least one sample')
    d = points.shape[1] if points.ndim == 2 else 1
    points = as_points(points, d)
    single = np.ndim(omega) == 0 or (np.ndim(omega) == 1 and d > 1)
    freqs = as_points(omega, d)
    block_size = block_size or get_setting('ECF_BLOCK_SIZE')

    n = points.shape[0]
    out = np.empty(freqs.shape[0], dtype=complex)
    for f_start in range(0, freqs.shape[0], ECF_FREQ_CHUNK):
        chunk = freqs[f_start:f_start + ECF_FREQ_CHUNK]
        partial = [
            np.exp(2j * math.pi * (points[start:start + block_size] @ chunk.T)).sum(axis=0)
            for start in range(0, n, block_size)
        ]
        out[f_start:f_start + chunk.shape[0]] = np.sum(partial, axis=0) / n
    return complex(out[0]) if single else out


def build_search_set(freq_cover, dist, level, *, cf_mode=CfMode.ORACLE, clean_samples=None):
    """
    Frequencies of the cover where the (estimated) |phi_D| reaches `level`.

    In empirical mode phi_D is replaced by the ECF of `clean_samples` and
    the level is lowered by 5 / sqrt(m).

    Returns:
        SearchSet with the kept frequencies and the phi_D values used later
        for division.
    """
    points = freq_cover.points
    if CfMode(cf_mode) == CfMode.EMPIRICAL:
        if clean_samples is None:
            raise ArgumentError('empirical cf_mode needs clean samples')
        clean = as_points(clean_samples, dist.dimension)
        phi = ecf(clean, points)
        level = level - EMPIRICAL_LEVEL_SLACK / math.sqrt(clean.shape[0])
    else:
        phi = dist.cf(points)
    keep = np.abs(phi) >= level
    result = SearchSet(points[keep], phi[keep], float(level))
    logger.debug('Search set: %d of %d frequencies at level %.4g', len(result), len(points), level)
    return result


def test_statistic(mu_hat, omega, psi_hat, alpha):
    """
    T(w) = (1 - alpha) exp(2 pi i w.mu_hat) - psi_hat(w).

    With one candidate and one frequency this is a complex number; with a
    (c, d) batch of candidates and k frequencies it is a (c, k) array.
    """
    mu = np.asarray(mu_hat, dtype=float)
    freqs = np.asarray(omega, dtype=float)
    if mu.ndim <= 1 and freqs.ndim <= 1 and np.ndim(psi_hat) == 0:
        phase = 2.0 * math.pi * float(np.dot(np.atleast_1d(mu), np.atleast_1d(freqs)))
        return (1.0 - alpha) * complex(math.cos(phase), math.sin(phase)) - complex(psi_hat)
    d = freqs.shape[-1] if freqs.ndim == 2 else (mu.shape[-1] if mu.ndim == 2 else 1)
    candidates = as_points(mu, d)
    freqs = as_points(freqs, d)
    return (1.0 - alpha) * np.exp(2j * math.pi * (candidates @ freqs.T)) - np.asarray(psi_hat)[None, :]


def candidate_scores(candidates, search_set, psi_hat, alpha, *, block_size=None):
    """s(m) = max over the search set of |T_m(w)| for each candidate (0 when empty)."""
    block_size = block_size or get_setting('SCORE_BLOCK_SIZE')
    scores = np.zeros(candidates.shape[0])
    if len(search_set) == 0:
        return scores
    for start in range(0, candidates.shape[0], block_size):
        block = candidates[start:start + block_size]
        stats = test_statistic(block, search_set.frequencies, psi_hat, alpha)
        scores[start:start + block.shape[0]] = np.abs(stats).max(axis=1)
    return scores


def frequency_radius(config, dist, level, d):
    bound = config.norm_bound(d)
    return max(min(bound, dist.cf_level_radius(level)), config.frequency_eta())


# =============================================================================
# ESTIMATE
# =============================================================================

def estimate(config, samples, dist, *, precentering=True, candidate_center=None,
             clean_samples=None, clean_seed=None):
    """
    Run the witness tournament.

    Args:
        config: EstimatorConfig
        samples: (n, d) contaminated samples
        dist: BaseDistribution (the known noise law D)
        precentering: center the candidate cover on the coordinate-wise median
        candidate_center: center of the candidate cover when precentering is off
        clean_samples: draws from D for empirical cf_mode (drawn with
            clean_seed when omitted)

    Returns:
        EstimateReport

    Raises:
        ArgumentError: dimension above MAX_DIMENSION or mismatched samples
        ResourceError: a cover exceeds COVER_SIZE_CAP
    """
    d = dist.dimension
    check_dimension(d)
    points = as_points(samples, d)
    n = points.shape[0]
    if n == 0:
        raise ArgumentError('estimate needs at least one sample')
    warnings = []

    if precentering:
        shift = precenter(points, config.alpha)
    elif candidate_center is not None:
        shift = as_vector(candidate_center, d)
    else:
        shift = np.zeros(d)

    bound = config.norm_bound(d)
    try:
        budget = sample_budget(config, d)
    except ArgumentError as exc:
        budget = None
        warnings.append(f'sample budget undefined: {exc}')
    if budget is not None and n < budget:
        warnings.append(f'n={n} is below the sample budget {budget}')
        logger.warning('estimate: n=%d below the sample budget %d', n, budget)

    eps_prime = config.candidate_eta(d)
    eta = config.frequency_eta()
    candidates = build_cover(config.R, eps_prime, d, center=shift)

    level = config.delta / 2.0
    if config.cf_mode == CfMode.EMPIRICAL:
        if clean_samples is None:
            clean_samples = dist.sample(clean_seed, config.clean_count_m)
        radius_level = level - EMPIRICAL_LEVEL_SLACK / math.sqrt(config.clean_count_m)
        radius = bound if radius_level <= 0 else frequency_radius(config, dist, radius_level, d)
    else:
        radius = frequency_radius(config, dist, level, d)
    freq_cover = build_cover(radius, eta, d)
    search_set = build_search_set(
        freq_cover, dist, level, cf_mode=config.cf_mode, clean_samples=clean_samples
    )
    if len(search_set) == 0:
        warnings.append('empty search set; every candidate scores 0')
        logger.warning('estimate: empty search set (delta=%.4g)', config.delta)
        psi_hat = np.empty(0, dtype=complex)
    else:
        psi_hat = ecf(points, search_set.frequencies) / search_set.phi_values

    scores = candidate_scores(candidates.points, search_set, psi_hat, config.alpha)
    # Cover points are lexicographic, so argmin's first hit is the tie-break
    best = int(np.argmin(scores))
    logger.debug(
        'estimate: n=%d |C_mu|=%d |S_w|=%d eps_prime=%.4g eta=%.4g score=%.4g',
        n, len(candidates), len(search_set), eps_prime, eta, scores[best],
    )
    return EstimateReport(
        mu_hat=candidates.points[best].copy(),
        score=float(scores[best]),
        n_used=n,
        search_set_size=len(search_set),
        candidate_count=len(candidates),
        per_candidate_scores=scores,
        candidates=candidates.points,
        shift=shift,
        candidate_resolution=eps_prime,
        frequency_resolution=eta,
        frequency_radius=radius,
        witness_norm_bound=bound,
        sample_budget=budget,
        warnings=warnings,
    )
