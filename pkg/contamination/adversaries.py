"""
==============================================================================
CONTAMINATION APP - ADVERSARIES
==============================================================================
Shift distributions Q for the mean-shift contamination model.

All adversaries are atomic: each exposes its atoms (shift locations and
probabilities) given the clean mean mu, which gives both a sampler and an
exact characteristic function.

Kinds:
    - PointShift(z):          Q = delta_z
    - MixtureOfPoints(atoms): Q = sum_k p_k delta_{z_k}
    - AtomicMeasure(Q):       a probability SignedAtomicMeasure (1D), e.g. the
                              Q0 / Q1 pair of the lower-bound construction
    - NullAdversary:          Q = delta_mu (no effective contamination)

Author: ShiftRobust Development Team
==============================================================================
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from django.db import models

from core.exceptions import ArgumentError
from core.numerics import as_points, as_vector
from lowerbound.measures import SignedAtomicMeasure

PROBABILITY_TOL = 1e-12
MEASURE_PROBABILITY_TOL = 1e-10


class AdversaryKind(models.TextChoices):
    POINT_SHIFT = 'point_shift', 'Point shift'
    MIXTURE = 'mixture', 'Mixture of points'
    ATOMIC = 'atomic', 'Atomic probability measure'
    NULL = 'null', 'No contamination (Q = delta_mu)'


class Adversary:
    """Common interface of the shift distributions."""

    kind = None

    def atoms(self, mu):
        """Return (locations (k, d), probabilities (k,)) of Q."""
        raise NotImplementedError

    def dimension(self):
        """Dimension of the shifts, or None when it follows mu."""
        return None

    def to_json(self):
        raise NotImplementedError

    @property
    def descriptor(self):
        """Compact one-line label used in benchmark rows."""
        return json.dumps(self.to_json(), sort_keys=True, separators=(',', ':'))

    def cf(self, mu, freqs):
        """phi_Q at a batch of frequencies (k, d)."""
        locations, probabilities = self.atoms(mu)
        phases = np.exp(2j * math.pi * (freqs @ locations.T))
        return phases @ probabilities


@dataclass(frozen=True)
class PointShift(Adversary):
    z: tuple

    kind = AdversaryKind.POINT_SHIFT

    def __post_init__(self):
        object.__setattr__(self, 'z', tuple(as_vector(self.z).tolist()))

    def dimension(self):
        return len(self.z)

    def atoms(self, mu):
        return np.asarray([self.z], dtype=float), np.ones(1)

    def to_json(self):
        return {'kind': self.kind.value, 'z': list(self.z)}


@dataclass(frozen=True)
class MixtureOfPoints(Adversary):
    locations: tuple
    probabilities: tuple

    kind = AdversaryKind.MIXTURE

    def __post_init__(self):
        probabilities = np.asarray(self.probabilities, dtype=float).ravel()
        locations = as_points(self.locations)
        if locations.shape[0] != probabilities.size or probabilities.size == 0:
            raise ArgumentError('mixture needs one probability per location')
        if np.any(probabilities < 0):
            raise ArgumentError('mixture probabilities must be nonnegative')
        if abs(probabilities.sum() - 1.0) > PROBABILITY_TOL:
            raise ArgumentError(
                f'mixture probabilities must sum to 1, got {probabilities.sum()!r}'
            )
        object.__setattr__(self, 'locations', tuple(map(tuple, locations.tolist())))
        object.__setattr__(self, 'probabilities', tuple(probabilities.tolist()))

    def dimension(self):
        return len(self.locations[0])

    def atoms(self, mu):
        return np.asarray(self.locations, dtype=float), np.asarray(self.probabilities)

    def to_json(self):
        return {
            'kind': self.kind.value,
            'atoms': [[list(loc), p] for loc, p in zip(self.locations, self.probabilities)],
        }


@dataclass(frozen=True, eq=False)
class AtomicMeasure(Adversary):
    measure: SignedAtomicMeasure

    kind = AdversaryKind.ATOMIC

    def __post_init__(self):
        if not self.measure.is_probability(MEASURE_PROBABILITY_TOL):
            raise ArgumentError(
                'atomic adversary must be a probability measure '
                f'(nonnegative weights summing to 1), got mass {self.measure.total_mass()!r}'
            )

    def dimension(self):
        return 1

    def atoms(self, mu):
        weights = self.measure.weights
        return self.measure.locations.reshape(-1, 1), weights / weights.sum()

    def to_json(self):
        return {
            'kind': self.kind.value,
            'locations': self.measure.locations.tolist(),
            'weights': self.measure.weights.tolist(),
        }


@dataclass(frozen=True)
class NullAdversary(Adversary):

    kind = AdversaryKind.NULL

    def atoms(self, mu):
        return np.asarray([mu], dtype=float), np.ones(1)

    def to_json(self):
        return {'kind': self.kind.value}


def adversary_from_json(payload):
    """Build an adversary from its JSON object (see the module docstring)."""
    kind = AdversaryKind(payload['kind'])
    if kind == AdversaryKind.POINT_SHIFT:
        return PointShift(payload['z'])
    if kind == AdversaryKind.MIXTURE:
        atoms = payload['atoms']
        return MixtureOfPoints([a[0] for a in atoms], [a[1] for a in atoms])
    if kind == AdversaryKind.ATOMIC:
        return AtomicMeasure(
            SignedAtomicMeasure.from_atoms(payload['locations'], payload['weights'])
        )
    return NullAdversary()
