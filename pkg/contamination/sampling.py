"""
==============================================================================
CONTAMINATION APP - MODEL AND SAMPLER
==============================================================================
The alpha-mean-shift contamination model: each observation is mu + y with
probability 1 - alpha and z + y with probability alpha, where z ~ Q and
y ~ D.

RNG consumption order (fixed, per call of draw_contaminated):
    1. n uniform coins (contaminated iff coin < alpha)
    2. n shift indices drawn from Q's atoms (skipped when Q has one atom)
    3. n base draws y ~ D

Author: ShiftRobust Development Team
==============================================================================
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from contamination.adversaries import Adversary, NullAdversary, adversary_from_json
from core.exceptions import ArgumentError
from core.numerics import as_generator, as_points, as_vector
from distributions.base import BaseDistribution

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ContaminationModel:
    """
    The (alpha, mu, Q) triple over a base distribution D.

    alpha = 0 is accepted so tests can switch contamination off; configs read
    from disk are held to 0 < alpha < 1/2 by ContaminationModelForm.
    """
    alpha: float
    mu: np.ndarray
    adversary: Adversary
    base: BaseDistribution

    def __post_init__(self):
        alpha = float(self.alpha)
        if not 0.0 <= alpha < 0.5:
            raise ArgumentError(f'alpha must lie in [0, 1/2), got {alpha!r}')
        mu = as_vector(self.mu, self.base.dimension)
        mu.setflags(write=False)
        adversary_dim = self.adversary.dimension()
        if adversary_dim is not None and adversary_dim != self.base.dimension:
            raise ArgumentError(
                f'adversary dimension {adversary_dim} does not match d={self.base.dimension}'
            )
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'mu', mu)

    @property
    def dimension(self):
        return self.base.dimension

    def to_json(self):
        return {
            'alpha': self.alpha,
            'mu': self.mu.tolist(),
            'adversary': self.adversary.to_json(),
            'base': self.base.to_json(),
        }

    @classmethod
    def from_json(cls, payload):
        return cls(
            alpha=payload['alpha'],
            mu=payload['mu'],
            adversary=adversary_from_json(payload.get('adversary', {'kind': 'null'})),
            base=BaseDistribution.from_json(payload['base']),
        )


def draw_contaminated(model, seed, n, *, return_clean_mask=False):
    """
    Draw n samples from the contaminated distribution.

    Args:
        model: ContaminationModel
        seed: int seed or numpy Generator
        n: number of samples (>= 1)
        return_clean_mask: also return a boolean mask of clean draws

    Returns:
        (n, d) array, or (samples, clean_mask) when requested.
    """
    if n < 1:
        raise ArgumentError(f'n must be >= 1, got {n}')
    rng = as_generator(seed)
    n = int(n)

    contaminated = rng.random(n) < model.alpha

    locations, probabilities = model.adversary.atoms(model.mu)
    if probabilities.size > 1:
        index = rng.choice(probabilities.size, size=n, p=probabilities)
    else:
        index = np.zeros(n, dtype=int)

    noise = model.base.sample(rng, n)
    shifts = np.where(contaminated[:, None], locations[index], model.mu[None, :])

    logger.debug(
        'Drew %d samples, %d contaminated (alpha=%.4g)', n, int(contaminated.sum()), model.alpha
    )
    samples = shifts + noise
    if return_clean_mask:
        return samples, ~contaminated
    return samples


def population_cf(model, omega):
    """
    Exact CF of the contaminated distribution,
    phi_D(w) * ((1 - alpha) exp(2 pi i w.mu) + alpha phi_Q(w)).

    Args:
        model: ContaminationModel
        omega: one frequency or a batch (k, d)
    """
    d = model.dimension
    single = np.ndim(omega) == 0 or (np.ndim(omega) == 1 and d > 1)
    freqs = as_points(omega, d)
    clean = np.exp(2j * math.pi * (freqs @ model.mu))
    mixture = (1.0 - model.alpha) * clean + model.alpha * model.adversary.cf(model.mu, freqs)
    values = model.base.cf(freqs) * mixture
    return complex(values[0]) if single else values


def null_model(base, mu):
    """Uncontaminated model over base, shifted to mu."""
    return ContaminationModel(0.0, mu, NullAdversary(), base)
