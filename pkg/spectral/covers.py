"""
==============================================================================
SPECTRAL APP - COVERS
==============================================================================
Finite eta-nets of Euclidean balls, built as axis-aligned grids.

A grid of pitch 2 eta / sqrt(d) puts every point of space within half a cell
diagonal (= eta) of a grid point, so intersecting it with the ball of radius
R + eta gives an eta-cover of the ball of radius R. Points come out in
lexicographic order, which the estimator relies on for tie-breaking.

Author: ShiftRobust Development Team
==============================================================================
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.conf import get_setting
from core.exceptions import ArgumentError, ResourceError
from core.numerics import as_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Cover:
    """
    An eta-cover of the ball of radius R around `center`.

    Attributes:
        points: (k, d) array in lexicographic order
        radius_R: radius of the covered ball
        resolution_eta: covering radius
        center: ball center (zeros unless shifted)
    """
    points: np.ndarray
    radius_R: float
    resolution_eta: float
    center: np.ndarray

    @property
    def dimension(self):
        return self.points.shape[1]

    @property
    def pitch(self):
        return 2.0 * self.resolution_eta / math.sqrt(self.dimension)

    def __len__(self):
        return self.points.shape[0]

    def nearest(self, queries):
        """Distance from each query point to its nearest cover point."""
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        best = np.full(queries.shape[0], np.inf)
        for start in range(0, len(self), 4096):
            block = self.points[start:start + 4096]
            dist = np.linalg.norm(queries[:, None, :] - block[None, :, :], axis=2)
            best = np.minimum(best, dist.min(axis=1))
        return best

    def to_json(self, include_points=False):
        payload = {
            'size': len(self),
            'radius_R': self.radius_R,
            'resolution_eta': self.resolution_eta,
            'pitch': self.pitch,
            'center': self.center.tolist(),
        }
        if include_points:
            payload['points'] = self.points.tolist()
        return payload


def check_dimension(d):
    max_d = get_setting('MAX_DIMENSION')
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= max_d:
        raise ArgumentError(f'd must be an integer in [1, {max_d}], got {d!r}')


def predicted_cover_size(R, eta, d):
    """Number of grid points in the bounding cube, an upper bound on |cover|."""
    pitch = 2.0 * eta / math.sqrt(d)
    half = math.floor((R + eta) / pitch * (1 + 1e-12))
    return (2 * half + 1) ** d


def build_cover(R, eta, d, *, center=None, cap=None):
    """
    Build an eta-cover of the ball of radius R in d dimensions.

    Args:
        R: radius of the ball to cover (> 0)
        eta: covering radius (> 0)
        d: dimension, 1 <= d <= MAX_DIMENSION
        center: optional ball center (the grid is translated with it)
        cap: maximum number of points (defaults to COVER_SIZE_CAP)

    Returns:
        Cover

    Raises:
        ArgumentError: bad radius, resolution or dimension
        ResourceError: the predicted size exceeds the cap
    """
    check_dimension(d)
    if not (R > 0 and math.isfinite(R)):
        raise ArgumentError(f'R must be positive and finite, got {R!r}')
    if not (eta > 0 and math.isfinite(eta)):
        raise ArgumentError(f'eta must be positive and finite, got {eta!r}')
    cap = get_setting('COVER_SIZE_CAP') if cap is None else cap

    predicted = predicted_cover_size(R, eta, d)
    if predicted > cap:
        raise ResourceError(
            f'Cover of radius {R:.6g} at resolution {eta:.6g} in d={d} would need '
            f'{predicted} points (cap {cap})',
            required=predicted,
            hint='increase COVER_SIZE_CAP or relax the resolution',
        )

    pitch = 2.0 * eta / math.sqrt(d)
    half = math.floor((R + eta) / pitch * (1 + 1e-12))
    axis = pitch * np.arange(-half, half + 1, dtype=float)
    mesh = np.meshgrid(*([axis] * d), indexing='ij')
    points = np.stack([m.ravel() for m in mesh], axis=1)
    keep = np.linalg.norm(points, axis=1) <= (R + eta) * (1 + 1e-12)
    points = points[keep]

    center = np.zeros(d) if center is None else as_vector(center, d)
    points = points + center
    logger.debug('Built cover: R=%.4g eta=%.4g d=%d -> %d points', R, eta, d, points.shape[0])
    return Cover(points=points, radius_R=float(R), resolution_eta=float(eta), center=center)


def sphere_directions(d, count):
    """
    Deterministic near-uniform unit directions.

    d = 1 gives {+1}; d = 2 evenly spaced angles on a half circle (directions
    and their negatives are equivalent for symmetric distributions); d = 3 a
    Fibonacci lattice on the upper hemisphere.
    """
    check_dimension(d)
    if d == 1:
        return np.ones((1, 1))
    if d == 2:
        angles = np.pi * np.arange(count) / count
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)
    index = np.arange(count) + 0.5
    z = index / count
    radius = np.sqrt(1.0 - z * z)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    theta = golden * index
    return np.stack([radius * np.cos(theta), radius * np.sin(theta), z], axis=1)
