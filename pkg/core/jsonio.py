"""JSON helpers: numpy-aware encoding, versioned config files, complex formatting."""

import json
from pathlib import Path

import numpy as np

from core.exceptions import ArgumentError

CONFIG_VERSION = 1


class NumpyJSONEncoder(json.JSONEncoder):
    """Encode numpy scalars/arrays and complex numbers."""

    def default(self, o):
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (complex, np.complexfloating)):
            return {'re': float(o.real), 'im': float(o.imag)}
        return super().default(o)


def dumps(payload, *, indent=2):
    """Serialize with sorted keys so identical payloads give identical bytes."""
    return json.dumps(payload, cls=NumpyJSONEncoder, indent=indent, sort_keys=True)


def write_json(payload, path):
    path = Path(path)
    try:
        path.write_text(dumps(payload) + '\n', encoding='utf-8')
    except OSError as exc:
        raise OSError(f'Could not write {path}: {exc}') from exc


def load_config(path):
    """
    Read a versioned JSON config document.

    Args:
        path: Path to a JSON file whose top level carries "version": 1.

    Returns:
        dict: The parsed document.

    Raises:
        ArgumentError: Missing file, malformed JSON or unsupported version.
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding='utf-8'))
    except FileNotFoundError as exc:
        raise ArgumentError(f'Config file not found: {path}') from exc
    except json.JSONDecodeError as exc:
        raise ArgumentError(f'Config file {path} is not valid JSON: {exc}') from exc

    if not isinstance(document, dict):
        raise ArgumentError(f'Config file {path} must hold a JSON object')
    version = document.get('version')
    if version != CONFIG_VERSION:
        raise ArgumentError(
            f'Config file {path} has version {version!r}; expected {CONFIG_VERSION}'
        )
    return document


def format_complex(z):
    """Render a complex number as '<re><+/-im>i', e.g. 1+0i or 0.29-0.5i."""
    z = complex(z)
    re = 0.0 if z.real == 0 else z.real
    im = 0.0 if z.imag == 0 else z.imag
    return f'{re:.17g}{im:+.17g}i'
