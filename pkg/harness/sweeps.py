"""
==============================================================================
HARNESS APP - BENCHMARK SWEEPS
==============================================================================
Runs the estimator over a grid of (epsilon, n) cells and turns every trial
into a BenchmarkRecord.

Seeds: trial t of every cell uses seed (master_seed + t) mod 2^64, so each
cell sees the same seed sequence and the record set only depends on the
sweep config. Cells are independent and run on a joblib worker pool.

Also here:
    - find_minimal_n: doubling search for the smallest n reaching 2/3 success,
      bounded by AUTO_N_CAP and reporting why it stopped
    - fit_trend: least-squares log-n trends (scikit-learn LinearRegression)

Author: ShiftRobust Development Team
==============================================================================
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from operator import attrgetter
from typing import Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.linear_model import LinearRegression

from contamination.adversaries import Adversary
from contamination.sampling import ContaminationModel, draw_contaminated
from core.conf import get_setting
from core.exceptions import ArgumentError, ResourceError, ShiftRobustError
from distributions.base import BaseDistribution
from estimator.config import DEFAULT_RADIUS_R, PRESETS, PresetKind
from estimator.tournament import estimate, frequency_radius, sample_budget
from harness.models import BenchmarkRecord
from spectral.covers import predicted_cover_size

logger = logging.getLogger(__name__)

SEED_MODULUS = 2**64

# Success probability the upper bound guarantees
SUCCESS_RATE_TARGET = 2.0 / 3.0

AUTO = 'auto'


class TrendAxis:
    ALPHA_OVER_EPS_SQUARED = 'alpha_over_eps_squared'
    LOG_INV_EPS = 'log_inv_eps'

    choices = [
        (ALPHA_OVER_EPS_SQUARED, '(alpha / epsilon)^2'),
        (LOG_INV_EPS, 'log(1 / epsilon)'),
    ]


def trial_seed(master_seed, trial):
    return (int(master_seed) + int(trial)) % SEED_MODULUS


# =============================================================================
# SWEEP CONFIG
# =============================================================================

@dataclass(frozen=True, eq=False)
class BenchmarkCell:
    """One (distribution, adversary, alpha, mu, epsilon, n) grid point; n=None means auto."""
    dist: BaseDistribution
    adversary: Adversary
    alpha: float
    mu: tuple
    epsilon: float
    n: Optional[int]
    estimator: dict = field(default_factory=dict)
    preset: str = PresetKind.THEORY

    def model(self):
        return ContaminationModel(self.alpha, list(self.mu), self.adversary, self.dist)

    def config(self):
        overrides = dict(self.estimator)
        R = overrides.pop('R', DEFAULT_RADIUS_R)
        A = overrides.pop('A', None)
        build = PRESETS[PresetKind(self.preset)]
        return build(self.dist, self.epsilon, self.alpha, R=R, A=A, **overrides)

    def base_row(self):
        return {
            'dist': self.dist.label,
            'd': self.dist.dimension,
            'alpha': float(self.alpha),
            'epsilon': float(self.epsilon),
            'adversary': self.adversary.descriptor,
        }


@dataclass(frozen=True, eq=False)
class SweepConfig:
    dist: BaseDistribution
    adversary: Adversary
    alpha: float
    mu: tuple
    epsilons: tuple
    n_values: object  # tuple of ints, or AUTO
    trials: int
    master_seed: int = 0
    estimator: dict = field(default_factory=dict)
    out: Optional[str] = None
    preset: str = PresetKind.THEORY

    def __post_init__(self):
        if self.trials < 1:
            raise ArgumentError(f'trials must be >= 1, got {self.trials}')
        if not self.epsilons:
            raise ArgumentError('the epsilon sweep is empty')
        if self.n_values != AUTO and not self.n_values:
            raise ArgumentError('the n sweep is empty')

    @property
    def auto_n(self):
        return self.n_values == AUTO

    def cell(self, epsilon, n=None):
        return BenchmarkCell(
            self.dist, self.adversary, self.alpha, tuple(self.mu), float(epsilon), n,
            dict(self.estimator), self.preset,
        )

    def cells(self):
        n_values = (None,) if self.auto_n else tuple(self.n_values)
        return [self.cell(epsilon, n) for epsilon in self.epsilons for n in n_values]


# =============================================================================
# RUNNING CELLS
# =============================================================================

def resolve_n(cell, config):
    """The cell's n, or the sample budget capped at AUTO_N_CAP when n is auto."""
    if cell.n is not None:
        return int(cell.n)
    budget = sample_budget(config, cell.dist.dimension)
    cap = get_setting('AUTO_N_CAP')
    if budget > cap:
        logger.warning('auto n=%d for eps=%.4g capped at %d', budget, cell.epsilon, cap)
    return min(budget, cap)


def check_cell_covers(config, dist):
    """Raise ResourceError early when either cover would exceed the cap."""
    d = dist.dimension
    cap = get_setting('COVER_SIZE_CAP')
    radius = frequency_radius(config, dist, config.delta / 2.0, d)
    for label, R, eta in (
        ('candidate', config.R, config.candidate_eta(d)),
        ('frequency', radius, config.frequency_eta()),
    ):
        size = predicted_cover_size(R, eta, d)
        if size > cap:
            raise ResourceError(
                f'{label} cover needs {size} points (cap {cap})',
                required=size,
                hint='set candidate_resolution / frequency_resolution in the estimator section',
            )


def _skipped_row(cell, n, seed, exc):
    logger.warning('Skipping eps=%.4g n=%s seed=%d: %s', cell.epsilon, n, seed, exc)
    return {
        **cell.base_row(),
        'n': int(n or 0),
        'seed': int(seed),
        'success': False,
        'runtime_ms': 0.0,
        'score': None,
        'skipped': True,
        'skip_reason': str(exc),
    }


def run_cell(cell, trials, master_seed, *, deterministic_runtime=False):
    """
    Run every trial of one cell.

    Returns:
        list of row dicts (BenchmarkRecord fields). A single skipped row when
        the cell cannot run at all; a trial that fails on its own becomes a
        skipped row for its seed and the remaining trials still run.
    """
    try:
        config = cell.config()
        n = resolve_n(cell, config)
        check_cell_covers(config, cell.dist)
    except ShiftRobustError as exc:
        return [_skipped_row(cell, cell.n, master_seed, exc)]

    model = cell.model()
    rows = []
    for trial in range(trials):
        seed = trial_seed(master_seed, trial)
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        try:
            samples = draw_contaminated(model, rng, n)
            report = estimate(config, samples, cell.dist, clean_seed=rng)
        except ShiftRobustError as exc:
            rows.append(_skipped_row(cell, n, seed, exc))
            continue
        elapsed = 0.0 if deterministic_runtime else 1000.0 * (time.perf_counter() - start)
        error = float(np.linalg.norm(report.mu_hat - model.mu))
        rows.append({
            **cell.base_row(),
            'n': n,
            'seed': seed,
            'success': error <= cell.epsilon,
            'runtime_ms': elapsed,
            'score': report.score,
            'skipped': False,
            'skip_reason': '',
        })
    logger.debug(
        'cell eps=%.4g n=%d: %d/%d successes',
        cell.epsilon, n, sum(row['success'] for row in rows), trials,
    )
    return rows


def run_benchmark(sweep, *, n_jobs=None):
    """
    Run every cell of the sweep.

    Returns:
        list of unsaved BenchmarkRecord, sorted by (dist, d, alpha, epsilon, n, seed)
    """
    n_jobs = get_setting('BENCH_N_JOBS') if n_jobs is None else n_jobs
    deterministic = bool(get_setting('DETERMINISTIC_RUNTIME'))
    cells = sweep.cells()
    logger.info('Running %d cells x %d trials on %d worker(s)', len(cells), sweep.trials, n_jobs)

    outputs = Parallel(n_jobs=n_jobs)(
        delayed(run_cell)(cell, sweep.trials, sweep.master_seed, deterministic_runtime=deterministic)
        for cell in cells
    )
    records = [BenchmarkRecord(**row) for rows in outputs for row in rows]
    records.sort(key=attrgetter('sort_key'))
    return records


def success_rates(records):
    """Per-cell success rate over the non-skipped records, as a DataFrame."""
    rows = [record.as_row() for record in records if not record.skipped]
    columns = ['dist', 'd', 'alpha', 'epsilon', 'n', 'adversary']
    if not rows:
        return pd.DataFrame(columns=columns + ['trials', 'success_rate'])
    frame = pd.DataFrame(rows)
    grouped = frame.groupby(columns, sort=True)['success']
    summary = grouped.agg(trials='count', success_rate='mean').reset_index()
    return summary


# =============================================================================
# MINIMAL n AND TRENDS
# =============================================================================

class StopReason:
    REACHED = 'reached'
    N_MAX = 'n_max'
    SKIPPED = 'skipped'


@dataclass(frozen=True)
class MinimalNSearch:
    """Outcome of find_minimal_n; ladder holds the (n, success rate) steps run."""
    n: Optional[int]
    stop_reason: str
    n_max: int
    ladder: tuple = ()
    detail: str = ''

    @property
    def reached(self):
        return self.stop_reason == StopReason.REACHED


def find_minimal_n(cell, trials, master_seed=0, *, n_start=64, n_max=None):
    """
    Smallest n on the doubling ladder n_start, 2 n_start, ... with success
    rate >= 2/3.

    The ladder never goes past AUTO_N_CAP, whatever n_max asks for. Skipped
    trials count as failures; the search stops as skipped only when every
    trial of a step was skipped.

    Returns:
        MinimalNSearch; n is None unless stop_reason is 'reached'
    """
    cap = get_setting('AUTO_N_CAP')
    if n_max is None or n_max > cap:
        if n_max is not None:
            logger.info('find_minimal_n: n_max=%d lowered to AUTO_N_CAP=%d', n_max, cap)
        n_max = cap
    n = int(n_start)
    ladder = []
    while n <= n_max:
        rows = run_cell(replace(cell, n=n), trials, master_seed, deterministic_runtime=True)
        if all(row['skipped'] for row in rows):
            reason = rows[0]['skip_reason']
            logger.warning('find_minimal_n: eps=%.4g n=%d skipped: %s', cell.epsilon, n, reason)
            return MinimalNSearch(None, StopReason.SKIPPED, n_max, tuple(ladder), reason)
        rate = sum(row['success'] for row in rows) / len(rows)
        ladder.append((n, rate))
        logger.debug('find_minimal_n: eps=%.4g n=%d rate=%.3f', cell.epsilon, n, rate)
        if rate >= SUCCESS_RATE_TARGET:
            return MinimalNSearch(n, StopReason.REACHED, n_max, tuple(ladder))
        n *= 2
    logger.warning('find_minimal_n: eps=%.4g did not reach 2/3 by n_max=%d', cell.epsilon, n_max)
    return MinimalNSearch(None, StopReason.N_MAX, n_max, tuple(ladder))


@dataclass(frozen=True)
class TrendFit:
    slope: float
    intercept: float
    r2: float

    def to_json(self):
        return {'slope': self.slope, 'intercept': self.intercept, 'r2': self.r2}


def fit_trend(x, y):
    """Least-squares line y = slope x + intercept with its R^2."""
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    y = np.asarray(y, dtype=float)
    if x.shape[0] < 2 or x.shape[0] != y.shape[0]:
        raise ArgumentError('fit_trend needs at least two (x, y) pairs of equal length')
    model = LinearRegression()
    model.fit(x, y)
    r2 = float(model.score(x, y)) if np.ptp(y) > 0 else 1.0
    return TrendFit(float(model.coef_[0]), float(model.intercept_), r2)


def trend_axis_value(axis, epsilon, alpha):
    if axis == TrendAxis.ALPHA_OVER_EPS_SQUARED:
        return (alpha / epsilon) ** 2
    if axis == TrendAxis.LOG_INV_EPS:
        return math.log(1.0 / epsilon)
    raise ArgumentError(f'Unknown trend axis: {axis!r}')


def run_trend(sweep, *, axis, n_start=64, n_max=None):
    """
    Minimal n per epsilon and the fit of log n against the chosen axis.

    Returns:
        dict with the per-epsilon points (minimal_n = None unless the search
        reached 2/3, with the stop reason and the ladder it ran) and the fit
        over the points that were reached (None with fewer than two)
    """
    points = []
    for epsilon in sweep.epsilons:
        cell = sweep.cell(epsilon)
        search = find_minimal_n(cell, sweep.trials, sweep.master_seed, n_start=n_start, n_max=n_max)
        points.append({
            'epsilon': cell.epsilon,
            'x': trend_axis_value(axis, cell.epsilon, sweep.alpha),
            'minimal_n': search.n,
            'stop_reason': search.stop_reason,
            'stop_detail': search.detail,
            'n_max': search.n_max,
            'ladder': [{'n': n, 'success_rate': rate} for n, rate in search.ladder],
        })
    reached = [p for p in points if p['minimal_n'] is not None]
    fit = None
    if len(reached) >= 2:
        fit = fit_trend([p['x'] for p in reached], [math.log(p['minimal_n']) for p in reached])
    return {
        'axis': axis,
        'alpha': sweep.alpha,
        'preset': str(sweep.preset),
        'dist': sweep.dist.to_json(),
        'points': points,
        'fit': None if fit is None else fit.to_json(),
    }
