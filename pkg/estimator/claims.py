"""
==============================================================================
ESTIMATOR APP - POPULATION CHECKS
==============================================================================
Noise-free versions of the tournament quantities, computed from the exact
contaminated CF instead of samples:

    psi(w) = phi_P(w) / phi_D(w) = (1 - alpha) exp(2 pi i w.mu) + alpha phi_Q(w)
    T_m(w) = (1 - alpha) exp(2 pi i w.m) - psi(w)

and the two bounds the tournament relies on, for v = m - mu:

    large:  |T_m(w)| >= 2 (1 - alpha) |sin(pi v.w)| - alpha
    small:  |T_m(w)| <= 2 (1 - alpha) pi |w| |v| + alpha

Author: ShiftRobust Development Team
==============================================================================
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from contamination.adversaries import PointShift
from contamination.sampling import ContaminationModel
from core.numerics import as_generator, as_points, as_vector
from distributions.base import BaseDistribution
from estimator.tournament import test_statistic
from spectral.witness import find_witness, scan_grid_for_witness

logger = logging.getLogger(__name__)

CLAIM_TOL = 1e-10


@dataclass(frozen=True)
class ClaimCheck:
    holds: bool
    value: float
    bound: float

    def to_json(self):
        return {'holds': self.holds, 'value': self.value, 'bound': self.bound}


def population_psi(model, omega):
    """Deconvolved population CF at a batch of frequencies (k, d)."""
    freqs = as_points(omega, model.dimension)
    clean = np.exp(2j * math.pi * (freqs @ model.mu))
    return (1.0 - model.alpha) * clean + model.alpha * model.adversary.cf(model.mu, freqs)


def population_statistic(model, mu_hat, omega, alpha=None):
    """
    T at candidate(s) mu_hat against the population psi.

    alpha defaults to the model's contamination rate.
    """
    alpha = model.alpha if alpha is None else alpha
    freqs = as_points(omega, model.dimension)
    return test_statistic(
        as_points(mu_hat, model.dimension), freqs, population_psi(model, freqs), alpha
    )


def check_large_T(model, mu_hat, omega, tol=CLAIM_TOL):
    omega = as_vector(omega, model.dimension)
    v = as_vector(mu_hat, model.dimension) - model.mu
    A = abs(math.sin(math.pi * float(v @ omega)))
    value = float(np.abs(population_statistic(model, mu_hat, omega))[0, 0])
    bound = 2.0 * (1.0 - model.alpha) * A - model.alpha
    return ClaimCheck(value >= bound - tol, value, bound)


def check_small_T(model, mu_hat, omega, tol=CLAIM_TOL):
    omega = as_vector(omega, model.dimension)
    v = as_vector(mu_hat, model.dimension) - model.mu
    value = float(np.abs(population_statistic(model, mu_hat, omega))[0, 0])
    bound = 2.0 * (1.0 - model.alpha) * math.pi * np.linalg.norm(omega) * np.linalg.norm(v) + model.alpha
    return ClaimCheck(value <= bound + tol, value, bound)


def population_scores(model, candidates, search_set, alpha=None):
    """max over the search set of |T| per candidate, without sampling noise."""
    candidates = as_points(candidates, model.dimension)
    if len(search_set) == 0:
        return np.zeros(candidates.shape[0])
    stats = population_statistic(model, candidates, search_set.frequencies, alpha)
    return np.abs(stats).max(axis=1)


def check_score_soundness(model, mu_hat, config, search_set, tol=CLAIM_TOL):
    """
    For |mu_hat - mu| >= eps: if the search set holds a witness for
    v = mu_hat - mu at (A/2, delta/2), the population score is at least
    (1 - alpha) A - alpha.

    Returns:
        ClaimCheck, or None when no witness is available in the search set.
    """
    v = as_vector(mu_hat, model.dimension) - model.mu
    if len(search_set) == 0:
        return None
    witness = scan_grid_for_witness(model.base, v, config.A / 2.0, config.delta / 2.0, search_set)
    if not witness.found:
        return None
    value = float(population_scores(model, mu_hat, search_set, config.alpha)[0])
    bound = (1.0 - config.alpha) * config.A - config.alpha
    return ClaimCheck(value >= bound - tol, value, bound)


def random_instance(rng):
    """A random (model, mu_hat) pair with a point-shift adversary."""
    choices = [
        BaseDistribution.gaussian(1), BaseDistribution.gaussian(2), BaseDistribution.laplace(1),
        BaseDistribution.laplace(3), BaseDistribution.uniform(), BaseDistribution.uniform_conv(2),
    ]
    base = choices[rng.integers(len(choices))]
    d = base.dimension
    mu = rng.uniform(-1.0, 1.0, size=d)
    z = rng.uniform(-10.0, 10.0, size=d)
    alpha = rng.uniform(0.01, 0.3)
    mu_hat = mu + rng.uniform(0.2, 2.0) * rng.standard_normal(d)
    return ContaminationModel(alpha, mu, PointShift(z), base), mu_hat


def verify_claims(seed=0, instances=20, frequencies=100, tol=CLAIM_TOL):
    """
    Run the large/small statistic bounds on random point-shift instances.

    The large bound is checked at the witness find_witness returns for
    v = mu_hat - mu (A drawn per instance); the small bound at random
    frequencies.

    Returns:
        dict with per-claim counts of checks and failures plus the worst
        observed slack.
    """
    rng = as_generator(seed)
    summary = {
        'instances': instances,
        'large_T': {'checked': 0, 'failed': 0, 'min_slack': math.inf},
        'small_T': {'checked': 0, 'failed': 0, 'min_slack': math.inf},
    }
    for _ in range(instances):
        model, mu_hat = random_instance(rng)
        v = mu_hat - model.mu
        A = rng.uniform(0.1, 0.9)
        witness = find_witness(model.base, v, A, 1e-6)
        if witness.found:
            check = check_large_T(model, mu_hat, witness.omega, tol)
            _record(summary['large_T'], check, check.value - check.bound)
        for omega in rng.uniform(-3.0, 3.0, size=(frequencies, model.dimension)):
            check = check_small_T(model, mu_hat, omega, tol)
            _record(summary['small_T'], check, check.bound - check.value)
    logger.info(
        'verify_claims: large_T %d/%d ok, small_T %d/%d ok',
        summary['large_T']['checked'] - summary['large_T']['failed'], summary['large_T']['checked'],
        summary['small_T']['checked'] - summary['small_T']['failed'], summary['small_T']['checked'],
    )
    return summary


def _record(bucket, check, slack):
    bucket['checked'] += 1
    bucket['failed'] += int(not check.holds)
    bucket['min_slack'] = min(bucket['min_slack'], float(slack))
