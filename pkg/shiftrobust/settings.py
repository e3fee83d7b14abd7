"""
==============================================================================
SHIFTROBUST - DJANGO SETTINGS
==============================================================================
Django settings for ShiftRobust: mean estimation under mean-shift
contamination and the matching Fourier lower-bound construction.

Configuration Overview:
    - Database: SQLite (benchmark runs and per-trial records only)
    - Numerics: every tunable lives in the SHIFTROBUST dict below and can be
      overridden with a SHIFTROBUST_<KEY> environment variable
    - Apps: core, distributions, contamination, spectral, estimator,
      lowerbound, harness
    - No web surface: the project is driven through management commands

Author: ShiftRobust Development Team
==============================================================================
"""

from pathlib import Path
import os

# ==============================================================================
# PATH CONFIGURATION
# ==============================================================================
# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# ==============================================================================
# SECURITY SETTINGS
# ==============================================================================
# Nothing is served, but Django still refuses to start without a key.
SECRET_KEY = os.environ.get('SHIFTROBUST_SECRET_KEY', 'shiftrobust-local-only-key')

DEBUG = os.environ.get('SHIFTROBUST_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# ==============================================================================
# APPLICATION DEFINITION
# ==============================================================================
SHIFTROBUST_APPS = [
    'core',
    'distributions',
    'contamination',
    'spectral',
    'estimator',
    'lowerbound',
    'harness',
]

INSTALLED_APPS = [
    'core.apps.CoreConfig',                    # Shared plumbing, exceptions, numerics
    'distributions.apps.DistributionsConfig',  # Base distributions D
    'contamination.apps.ContaminationConfig',  # Mean-shift contamination model
    'spectral.apps.SpectralConfig',            # Covers, witnesses, hardness quantities
    'estimator.apps.EstimatorConfig',          # Frequency-witness tournament
    'lowerbound.apps.LowerboundConfig',        # Fourier-matching hard instances
    'harness.apps.HarnessConfig',              # CLI, sweeps, records
]


# ==============================================================================
# DATABASE CONFIGURATION
# ==============================================================================
# Only the harness persists anything (benchmark runs), so SQLite is enough.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get(
            'SHIFTROBUST_DB_PATH', str(BASE_DIR / 'shiftrobust.sqlite3')
        ),
    }
}


# ==============================================================================
# INTERNATIONALIZATION
# ==============================================================================
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True


# ==============================================================================
# DEFAULT PRIMARY KEY FIELD TYPE
# ==============================================================================
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# ==============================================================================
# NUMERICAL CONFIGURATION
# ==============================================================================
def _env(name, default, cast):
    """Read SHIFTROBUST_<name> from the environment, falling back to default."""
    raw = os.environ.get(f'SHIFTROBUST_{name}')
    if raw is None:
        return default
    if cast is bool:
        return raw.strip().lower() in ('1', 'true', 'yes', 'on')
    return cast(raw)


SHIFTROBUST = {
    # Covers are grids, so their size is exponential in d
    'MAX_DIMENSION': _env('MAX_DIMENSION', 3, int),
    'COVER_SIZE_CAP': _env('COVER_SIZE_CAP', 10**7, int),

    # Sample budget (the unnamed constant C) and the per-trial cap for "auto" n
    'BUDGET_CONSTANT_C': _env('BUDGET_CONSTANT_C', 64.0, float),
    'AUTO_N_CAP': _env('AUTO_N_CAP', 10**7, int),

    # Block sizes for the ECF table and candidate scoring
    'ECF_BLOCK_SIZE': _env('ECF_BLOCK_SIZE', 65536, int),
    'SCORE_BLOCK_SIZE': _env('SCORE_BLOCK_SIZE', 4096, int),

    # 1D scans (witness intervals, delta quantity)
    'WITNESS_SCAN_POINTS': _env('WITNESS_SCAN_POINTS', 4001, int),

    # Lower-bound construction
    'QUAD_ABS_TOL': _env('QUAD_ABS_TOL', 1e-8, float),
    'TAIL_RELATIVE_TOL': _env('TAIL_RELATIVE_TOL', 1e-6, float),
    'MAX_ATOMS': _env('MAX_ATOMS', 10**6, int),

    # Benchmark harness
    'BENCH_N_JOBS': _env('BENCH_N_JOBS', 1, int),
    # runtime_ms is 0 unless this is off, so the default bench output is byte-identical
    'DETERMINISTIC_RUNTIME': _env('DETERMINISTIC_RUNTIME', True, bool),
}


# ==============================================================================
# LOGGING CONFIGURATION
# ==============================================================================
# Everything goes to stderr so stdout stays clean for JSON/CSV payloads.
LOG_LEVEL = os.environ.get('SHIFTROBUST_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
        },
        **{
            app: {
                'handlers': ['console'],
                'level': LOG_LEVEL,
                'propagate': False,
            }
            for app in SHIFTROBUST_APPS
        },
    },
}
