"""
==============================================================================
CORE APP - NUMERIC HELPERS
==============================================================================
Small numerical building blocks used across the apps:
    1. sinc with a series branch near its removable singularity
    2. distance to the nearest integer
    3. ceiling for sample counts that tolerates float noise
    4. RNG plumbing (seeds -> numpy Generators)

Author: ShiftRobust Development Team
==============================================================================
"""

import math

import numpy as np

from core.exceptions import ArgumentError

# Below this |pi*x| the Taylor series is used instead of sin(pi x)/(pi x)
SINC_SERIES_CUTOFF = 1e-4

# Relative slack when turning a real-valued bound into an integer count
CEIL_RELATIVE_SLACK = 1e-9


def sinpi(x):
    """sin(pi x), exactly zero at integers."""
    x = np.asarray(x, dtype=float)
    nearest = np.round(x)
    sign = np.where(np.mod(nearest, 2.0) == 0.0, 1.0, -1.0)
    out = sign * np.sin(np.pi * (x - nearest))
    return out if out.ndim else float(out)


def sinc(x):
    """
    Normalized sinc, sin(pi x) / (pi x), vectorized.

    Args:
        x: Scalar or array of reals.

    Returns:
        Array (or float) of the same shape with sinc(0) = 1.
    """
    x = np.asarray(x, dtype=float)
    t = np.pi * x
    small = np.abs(t) < SINC_SERIES_CUTOFF
    safe_t = np.where(small, 1.0, t)
    direct = sinpi(np.where(small, 1.0, x)) / safe_t
    t2 = t * t
    series = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def sinc_derivative(x):
    """Derivative of the normalized sinc with respect to x."""
    x = np.asarray(x, dtype=float)
    t = np.pi * x
    small = np.abs(t) < SINC_SERIES_CUTOFF
    safe_t = np.where(small, 1.0, t)
    direct = np.pi * (safe_t * np.cos(safe_t) - np.sin(safe_t)) / (safe_t * safe_t)
    series = np.pi * (-t / 3.0 + t ** 3 / 30.0)
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def integer_distance(t):
    """Distance from t to the nearest integer, |t - round(t)|."""
    t = np.asarray(t, dtype=float)
    out = np.abs(t - np.round(t))
    return out if out.ndim else float(out)


def ceil_count(value):
    """
    Ceiling of a positive real as an int, ignoring relative noise of 1e-9.

    10000.000000001 is treated as 10000; 10000.5 becomes 10001.
    """
    if not math.isfinite(value):
        raise ArgumentError(f'Cannot turn {value!r} into a count')
    return max(int(math.ceil(value * (1.0 - CEIL_RELATIVE_SLACK))), 0)


def as_generator(seed):
    """
    Normalize a seed or an existing Generator into a numpy Generator.

    Args:
        seed: None, an int, a SeedSequence or a Generator.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def as_points(values, d=None):
    """
    Coerce input into an (n, d) float array.

    A 1D array is read as n scalar points when d is 1 (or unknown) and as a
    single point otherwise.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        if d is None or d == 1:
            arr = arr.reshape(-1, 1)
        else:
            arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ArgumentError(f'Expected points of shape (n, d), got {arr.shape}')
    if d is not None and arr.shape[1] != d:
        raise ArgumentError(
            f'Dimension mismatch: expected d={d}, got d={arr.shape[1]}'
        )
    return arr


def as_vector(values, d=None):
    """Coerce a single point into a length-d float vector."""
    arr = np.atleast_1d(np.asarray(values, dtype=float)).ravel()
    if d is not None and arr.shape[0] != d:
        raise ArgumentError(
            f'Dimension mismatch: expected d={d}, got d={arr.shape[0]}'
        )
    return arr


def lexicographic_order(points):
    """Indices that sort the rows of an (n, d) array lexicographically."""
    points = np.asarray(points, dtype=float)
    # np.lexsort sorts by the last key first
    return np.lexsort(points.T[::-1])
