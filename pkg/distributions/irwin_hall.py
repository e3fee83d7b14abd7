"""
Exact density and CDF of a sum of m independent Uniform[-1, 1] variables.

The sum S equals 2U - m with U Irwin-Hall(m) on [0, m], so both functions
use the inclusion-exclusion form

    f_IH(u) = 1/(m-1)! * sum_{k <= floor(u)} (-1)^k C(m, k) (u - k)^(m-1)
    F_IH(u) = 1/m!     * sum_{k <= floor(u)} (-1)^k C(m, k) (u - k)^m

which is exact and cheap for the small m used here (m <= ~12).
"""

import math

import numpy as np

from core.exceptions import ArgumentError


def _check_order(m):
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ArgumentError(f'Irwin-Hall order must be a positive integer, got {m!r}')


def irwin_hall_pdf(x, m):
    """
    Density of the sum of m Uniform[-1, 1] variables, vectorized over x.

    Args:
        x: Evaluation points (scalar or array).
        m: Number of summands.

    Returns:
        Density values with the shape of x; zero outside [-m, m].
    """
    _check_order(m)
    x = np.asarray(x, dtype=float)
    u = (x + m) / 2.0
    total = np.zeros_like(u)
    for k in range(m + 1):
        active = u > k
        diff = np.where(active, u - k, 0.0)
        total += np.where(active, (-1) ** k * math.comb(m, k) * diff ** (m - 1), 0.0)
    inside = (u > 0) & (u < m)
    out = np.where(inside, np.clip(total / math.factorial(m - 1), 0.0, None), 0.0) / 2.0
    return out if out.ndim else float(out)


def irwin_hall_cdf(x, m):
    """CDF of the sum of m Uniform[-1, 1] variables, vectorized over x."""
    _check_order(m)
    x = np.asarray(x, dtype=float)
    u = (x + m) / 2.0
    total = np.zeros_like(u)
    for k in range(m + 1):
        diff = np.clip(u - k, 0.0, None)
        total += (-1) ** k * math.comb(m, k) * diff ** m
    out = np.clip(total / math.factorial(m), 0.0, 1.0)
    out = np.where(u <= 0, 0.0, np.where(u >= m, 1.0, out))
    return out if out.ndim else float(out)


def irwin_hall_breakpoints(m):
    """Knots of the piecewise polynomial density: -m, -m+2, ..., m."""
    _check_order(m)
    return np.arange(-m, m + 1, 2, dtype=float)
