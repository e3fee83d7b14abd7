"""
Dataset files: one sample per line, d columns, with a '#' header that
records the seed and the model JSON so the file can be regenerated.
"""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from core.exceptions import ArgumentError

logger = logging.getLogger(__name__)


def write_dataset(path, samples, *, seed=None, model=None):
    """
    Write samples to CSV.

    Args:
        path: destination file
        samples: (n, d) array
        seed: seed used to draw the samples (recorded in the header)
        model: ContaminationModel or BaseDistribution (recorded as JSON)
    """
    path = Path(path)
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    columns = [f'x{j}' for j in range(samples.shape[1])]
    header = []
    if seed is not None:
        header.append(f'# seed: {seed}')
    if model is not None:
        header.append(f'# model: {json.dumps(model.to_json(), sort_keys=True)}')
    try:
        with path.open('w', encoding='utf-8', newline='') as handle:
            for line in header:
                handle.write(line + '\n')
            pd.DataFrame(samples, columns=columns).to_csv(
                handle, index=False, float_format='%.17g', lineterminator='\n'
            )
    except OSError as exc:
        raise OSError(f'Could not write dataset {path}: {exc}') from exc
    logger.info('Wrote %d samples to %s', samples.shape[0], path)


def read_dataset(path):
    """
    Read a dataset written by write_dataset.

    Returns:
        (samples (n, d) array, metadata dict with optional 'seed' and 'model')
    """
    path = Path(path)
    metadata = {}
    try:
        with path.open(encoding='utf-8') as handle:
            for line in handle:
                if not line.startswith('#'):
                    break
                key, _, value = line[1:].strip().partition(':')
                value = value.strip()
                if key == 'seed':
                    metadata['seed'] = int(value)
                elif key == 'model':
                    metadata['model'] = json.loads(value)
        frame = pd.read_csv(path, comment='#', float_precision='round_trip')
    except FileNotFoundError as exc:
        raise ArgumentError(f'Samples file not found: {path}') from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as exc:
        raise ArgumentError(f'Could not parse samples file {path}: {exc}') from exc
    if frame.empty:
        raise ArgumentError(f'Samples file {path} holds no samples')
    return frame.to_numpy(dtype=float), metadata
