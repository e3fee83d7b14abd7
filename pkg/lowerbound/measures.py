"""
Finite signed atomic measures on the real line.

A measure is a sorted list of (location, weight) atoms with no zero weights.
It carries the truncation index K it was built with and a certified bound on
the L1 mass that was dropped by truncating.
"""

import math
from dataclasses import dataclass

import numpy as np

from core.exceptions import ArgumentError

CF_BLOCK = 2048


@dataclass(frozen=True)
class SignedAtomicMeasure:
    """
    Sum of weighted point masses, sum_k w_k delta(x - x_k).

    Attributes:
        locations: strictly increasing atom locations
        weights: nonzero real weights
        truncation_K: index range the atoms were built from (0 if exact)
        tail_bound: certified L1 mass beyond the truncation
    """
    locations: np.ndarray
    weights: np.ndarray
    truncation_K: int = 0
    tail_bound: float = 0.0

    def __post_init__(self):
        locations = np.asarray(self.locations, dtype=float).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        if locations.shape != weights.shape:
            raise ArgumentError('locations and weights must have the same length')
        if not (np.all(np.isfinite(locations)) and np.all(np.isfinite(weights))):
            raise ArgumentError('atoms must be finite')
        if locations.size > 1 and np.any(np.diff(locations) <= 0):
            raise ArgumentError('atom locations must be strictly increasing')
        if np.any(weights == 0):
            raise ArgumentError('zero-weight atoms must not be stored')
        locations.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, 'locations', locations)
        object.__setattr__(self, 'weights', weights)

    def __eq__(self, other):
        if not isinstance(other, SignedAtomicMeasure):
            return NotImplemented
        return (
            np.array_equal(self.locations, other.locations)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    # -------------------------------------------------------------------------
    # Constructors
    # -------------------------------------------------------------------------

    @classmethod
    def from_atoms(cls, locations, weights, *, truncation_K=0, tail_bound=0.0):
        """
        Build a measure from unsorted atoms.

        Atoms sharing a location are merged; atoms whose merged weight is
        exactly zero are dropped.
        """
        locations = np.asarray(locations, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if locations.shape != weights.shape:
            raise ArgumentError('locations and weights must have the same length')
        if locations.size == 0:
            return cls.zero(truncation_K=truncation_K, tail_bound=tail_bound)
        unique, inverse = np.unique(locations, return_inverse=True)
        merged = np.zeros(unique.size)
        np.add.at(merged, inverse, weights)
        keep = merged != 0
        return cls(unique[keep], merged[keep], truncation_K, tail_bound)

    @classmethod
    def zero(cls, **kwargs):
        return cls(np.empty(0), np.empty(0), **kwargs)

    @classmethod
    def dirac(cls, location=0.0, weight=1.0):
        return cls(np.array([float(location)]), np.array([float(weight)]))

    # -------------------------------------------------------------------------
    # Queries
    # -------------------------------------------------------------------------

    def __len__(self):
        return self.locations.size

    @property
    def atoms(self):
        return list(zip(self.locations.tolist(), self.weights.tolist()))

    def total_mass(self):
        return float(np.sum(self.weights))

    def l1_norm(self):
        return float(np.sum(np.abs(self.weights)))

    def positive_part(self):
        keep = self.weights > 0
        return SignedAtomicMeasure(self.locations[keep], self.weights[keep], self.truncation_K)

    def negative_part(self):
        """Magnitudes of the negative atoms, as a nonnegative measure."""
        keep = self.weights < 0
        return SignedAtomicMeasure(self.locations[keep], -self.weights[keep], self.truncation_K)

    def is_probability(self, tol=1e-10):
        return bool(np.all(self.weights > 0)) and abs(self.total_mass() - 1.0) <= tol

    def mass_beyond(self, radius):
        """L1 mass of the stored atoms with |x| > radius."""
        return float(np.sum(np.abs(self.weights[np.abs(self.locations) > radius])))

    def scaled(self, factor):
        if factor == 0:
            return SignedAtomicMeasure.zero(truncation_K=self.truncation_K)
        return SignedAtomicMeasure(
            self.locations, self.weights * factor, self.truncation_K,
            abs(factor) * self.tail_bound,
        )

    def __add__(self, other):
        return SignedAtomicMeasure.from_atoms(
            np.concatenate([self.locations, other.locations]),
            np.concatenate([self.weights, other.weights]),
            truncation_K=max(self.truncation_K, other.truncation_K),
            tail_bound=self.tail_bound + other.tail_bound,
        )

    def __neg__(self):
        return self.scaled(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def to_json(self):
        return {
            'atoms': [[x, w] for x, w in self.atoms],
            'truncation_K': self.truncation_K,
            'tail_bound': self.tail_bound,
            'total_mass': self.total_mass(),
            'l1_norm': self.l1_norm(),
        }

    @classmethod
    def from_json(cls, payload):
        atoms = payload.get('atoms', [])
        locations = [a[0] for a in atoms]
        weights = [a[1] for a in atoms]
        return cls.from_atoms(
            locations, weights,
            truncation_K=int(payload.get('truncation_K', 0)),
            tail_bound=float(payload.get('tail_bound', 0.0)),
        )


def atomic_cf(measure, omega):
    """
    Fourier transform of an atomic measure, sum_k w_k exp(2 pi i omega x_k).

    Args:
        measure: SignedAtomicMeasure
        omega: scalar or array of frequencies

    Returns:
        complex (scalar input) or complex array
    """
    omega = np.asarray(omega, dtype=float)
    if len(measure) == 0:
        out = np.zeros(omega.shape, dtype=complex)
        return complex(out) if out.ndim == 0 else out
    flat = omega.ravel()
    out = np.empty(flat.size, dtype=complex)
    for start in range(0, flat.size, CF_BLOCK):
        block = flat[start:start + CF_BLOCK]
        phases = np.exp(2j * math.pi * np.multiply.outer(block, measure.locations))
        out[start:start + CF_BLOCK] = phases @ measure.weights
    out = out.reshape(omega.shape)
    return complex(out) if out.ndim == 0 else out
