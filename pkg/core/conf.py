"""Access to the SHIFTROBUST settings dict with built-in fallbacks."""

from django.conf import settings

DEFAULTS = {
    'MAX_DIMENSION': 3,
    'COVER_SIZE_CAP': 10**7,
    'BUDGET_CONSTANT_C': 64.0,
    'AUTO_N_CAP': 10**7,
    'ECF_BLOCK_SIZE': 65536,
    'SCORE_BLOCK_SIZE': 4096,
    'WITNESS_SCAN_POINTS': 4001,
    'QUAD_ABS_TOL': 1e-8,
    'TAIL_RELATIVE_TOL': 1e-6,
    'MAX_ATOMS': 10**6,
    'BENCH_N_JOBS': 1,
    'DETERMINISTIC_RUNTIME': True,
}


def get_setting(name):
    """
    Look up a numeric knob.

    Works without a configured Django project (plain library use), in which
    case the defaults above apply.
    """
    if name not in DEFAULTS:
        raise KeyError(f'Unknown ShiftRobust setting: {name}')
    if not settings.configured:
        return DEFAULTS[name]
    return getattr(settings, 'SHIFTROBUST', {}).get(name, DEFAULTS[name])
