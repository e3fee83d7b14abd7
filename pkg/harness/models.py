"""
==============================================================================
HARNESS APP - MODELS
==============================================================================
Persistence for benchmark sweeps.

Key Models:
    - BenchmarkRun: one invocation of `bench --save` (sweep config + seed)
    - BenchmarkRecord: one estimator trial, or one skipped cell

Seeds are unsigned 64-bit values, which do not fit a signed BigIntegerField,
so they are stored as 20-digit decimals.

Author: ShiftRobust Development Team
==============================================================================
"""

import math

from django.core.validators import MaxValueValidator, MinValueValidator
from django.db import models


SEED_FIELD_DIGITS = 20


class BenchmarkRun(models.Model):
    """
    A saved sweep.

    Attributes:
        config (dict): The validated sweep config document
        master_seed (int): Seed the per-trial seeds are derived from
        record_count (int): Number of BenchmarkRecord rows (skipped cells included)
    """

    config = models.JSONField(
        default=dict,
        help_text="Sweep config document as read from --config"
    )

    master_seed = models.DecimalField(
        max_digits=SEED_FIELD_DIGITS,
        decimal_places=0,
        help_text="Unsigned 64-bit master seed"
    )

    record_count = models.PositiveIntegerField(default=0)

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name = 'Benchmark Run'
        verbose_name_plural = 'Benchmark Runs'
        ordering = ['-created_at']

    def __str__(self):
        return f"Run #{self.pk} (seed {self.master_seed}, {self.record_count} records)"

    def success_rate(self):
        """Fraction of successful trials over non-skipped records."""
        trials = self.records.filter(skipped=False)
        total = trials.count()
        if total == 0:
            return None
        return trials.filter(success=True).count() / total


class BenchmarkRecord(models.Model):
    """
    One (cell, seed) trial of the estimator.

    A cell that cannot run (cover too large, no valid sine threshold, ...)
    is stored as a single row with skipped=True and the reason.
    """

    run = models.ForeignKey(
        BenchmarkRun,
        on_delete=models.CASCADE,
        related_name='records',
        null=True,
        blank=True,
    )

    dist = models.CharField(max_length=32, help_text="Distribution label, e.g. gaussian")

    d = models.PositiveSmallIntegerField(validators=[MinValueValidator(1)])

    alpha = models.FloatField(
        validators=[MinValueValidator(0.0), MaxValueValidator(0.5)]
    )

    epsilon = models.FloatField(validators=[MinValueValidator(0.0)])

    n = models.PositiveBigIntegerField(help_text="Samples drawn for this trial")

    seed = models.DecimalField(max_digits=SEED_FIELD_DIGITS, decimal_places=0)

    success = models.BooleanField(default=False, help_text="||mu_hat - mu|| <= epsilon")

    runtime_ms = models.FloatField(default=0.0)

    score = models.FloatField(null=True, blank=True, help_text="Winning tournament score")

    adversary = models.TextField(help_text="Compact adversary JSON")

    skipped = models.BooleanField(default=False)

    skip_reason = models.TextField(blank=True)

    class Meta:
        verbose_name = 'Benchmark Record'
        verbose_name_plural = 'Benchmark Records'
        ordering = ['dist', 'd', 'alpha', 'epsilon', 'n', 'seed']
        indexes = [
            models.Index(fields=['run', 'epsilon'], name='harness_record_run_eps_idx'),
        ]

    def __str__(self):
        status = 'skipped' if self.skipped else ('ok' if self.success else 'fail')
        return f"{self.dist} eps={self.epsilon} n={self.n} seed={self.seed}: {status}"

    @property
    def sort_key(self):
        return (self.dist, self.d, self.alpha, self.epsilon, self.n, int(self.seed), self.adversary)

    def as_row(self):
        """The record as a plain dict in column order."""
        score = self.score
        return {
            'dist': self.dist,
            'd': int(self.d),
            'alpha': float(self.alpha),
            'epsilon': float(self.epsilon),
            'n': int(self.n),
            'seed': int(self.seed),
            'success': bool(self.success),
            'runtime_ms': float(self.runtime_ms),
            'score': None if score is None or math.isnan(score) else float(score),
            'adversary': self.adversary,
        }
