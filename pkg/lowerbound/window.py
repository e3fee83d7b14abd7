"""
==============================================================================
LOWERBOUND APP - SMOOTH BAND WINDOW
==============================================================================
The frequency window b_hat_w is the normalized convolution of a box of
half-width 3w/2 with three boxes of half-width w/6:

    b_hat_w(w') = (3/w)^3 (chi_{3w/2} * chi_{w/6} * chi_{w/6} * chi_{w/6})(w')

It equals 1 on [-w, w], vanishes outside [-2w, 2w] and has a closed form
through the CDF of a sum of three uniforms. Its inverse transform is

    b_w(x) = 3w sinc(3wx) sinc(wx/3)^3

with sinc(t) = sin(pi t)/(pi t).

Author: ShiftRobust Development Team
==============================================================================
"""

import math

import numpy as np

from core.exceptions import ArgumentError, InfeasibleError
from core.numerics import sinc, sinc_derivative
from distributions.irwin_hall import irwin_hall_cdf

# Lattice images summed on each side of the nearest one
PERIODIZATION_IMAGES = 3


def _check_width(w):
    if not (w > 0 and math.isfinite(w)):
        raise ArgumentError(f'window half-width w must be positive, got {w!r}')


def window_hat(w, omega):
    """b_hat_w(omega), vectorized over omega. Values lie in [0, 1]."""
    _check_width(w)
    omega = np.asarray(omega, dtype=float)
    scale = w / 6.0
    upper = irwin_hall_cdf((omega + 1.5 * w) / scale, 3)
    lower = irwin_hall_cdf((omega - 1.5 * w) / scale, 3)
    out = np.clip(np.asarray(upper) - np.asarray(lower), 0.0, 1.0)
    return out if out.ndim else float(out)


def window_time(w, x):
    """b_w(x) = 3w sinc(3wx) sinc(wx/3)^3, vectorized over x."""
    _check_width(w)
    x = np.asarray(x, dtype=float)
    out = 3.0 * w * np.asarray(sinc(3.0 * w * x)) * np.asarray(sinc(w * x / 3.0)) ** 3
    return out if out.ndim else float(out)


def window_derivative(w, x):
    """b_w'(x)."""
    _check_width(w)
    x = np.asarray(x, dtype=float)
    outer = np.asarray(sinc(3.0 * w * x))
    inner = np.asarray(sinc(w * x / 3.0))
    out = (
        9.0 * w * w * np.asarray(sinc_derivative(3.0 * w * x)) * inner ** 3
        + 3.0 * w * w * outer * inner ** 2 * np.asarray(sinc_derivative(w * x / 3.0))
    )
    return out if out.ndim else float(out)


def window_derivative_tail(w, X):
    """
    Upper bound on the integral of |b_w'| over |x| > X (X > 0).

    From |sinc(t)| <= 1/(pi |t|) and |sinc'(t)| <= 1/|t| + 1/(pi t^2):

        72 / (pi^3 w^2 X^3) + 54 / (pi^4 w^3 X^4)
    """
    _check_width(w)
    if not X > 0:
        raise ArgumentError(f'X must be positive, got {X!r}')
    return 72.0 / (math.pi ** 3 * w ** 2 * X ** 3) + 54.0 / (math.pi ** 4 * w ** 3 * X ** 4)


def check_band_separation(w, epsilon):
    """Bands of width 4w around the lattice k/eps must not overlap."""
    if 4.0 * w > 1.0 / epsilon:
        raise InfeasibleError(
            f'window half-width w={w:.6g} makes neighbouring bands overlap (4w > 1/eps = {1 / epsilon:.6g})',
            hint='use a smaller c so that w = c alpha / eps <= 1 / (4 eps)',
        )


def periodized_window(w, epsilon, omega):
    """
    rho_hat_w(omega) = sum over m of b_hat_w(omega - m/eps).

    Only the images with |m - round(eps omega)| <= 3 are summed, which is
    exact while the bands do not overlap.

    Raises:
        InfeasibleError: 4w > 1/eps
    """
    _check_width(w)
    check_band_separation(w, epsilon)
    omega = np.asarray(omega, dtype=float)
    nearest = np.round(omega * epsilon)
    total = np.zeros(omega.shape)
    for offset in range(-PERIODIZATION_IMAGES, PERIODIZATION_IMAGES + 1):
        total = total + np.asarray(window_hat(w, omega - (nearest + offset) / epsilon))
    return total if total.ndim else float(total)
