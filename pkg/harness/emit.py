"""
Record emission: BenchmarkRecord lists to CSV / JSON and back.

CSV has a header row and the fixed column order below; floats are written
with 17 significant digits so parsing restores them exactly. JSON is an
array of objects with the same keys plus the skip fields.
"""

import io
import json
import logging
import math
from pathlib import Path

import pandas as pd
from django.core.management.base import CommandError

from core.exceptions import ArgumentError
from core.jsonio import NumpyJSONEncoder
from harness.models import BenchmarkRecord

logger = logging.getLogger(__name__)

RECORD_COLUMNS = [
    'dist', 'd', 'alpha', 'epsilon', 'n', 'seed', 'success', 'runtime_ms', 'score', 'adversary',
]

SKIP_COLUMNS = ['skipped', 'skip_reason']

FLOAT_FORMAT = '%.17g'


class RecordFormat:
    CSV = 'csv'
    JSON = 'json'

    choices = [CSV, JSON]

    @classmethod
    def from_path(cls, path, default=CSV):
        suffix = Path(path).suffix.lower().lstrip('.')
        return suffix if suffix in cls.choices else default


def records_frame(records):
    rows = [record.as_row() for record in records]
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)


def records_to_text(records, fmt=RecordFormat.CSV):
    """Render records as CSV or JSON text."""
    if fmt == RecordFormat.CSV:
        buffer = io.StringIO()
        records_frame(records).to_csv(
            buffer, index=False, float_format=FLOAT_FORMAT, lineterminator='\n'
        )
        return buffer.getvalue()
    if fmt == RecordFormat.JSON:
        payload = [
            {**record.as_row(), 'skipped': record.skipped, 'skip_reason': record.skip_reason}
            for record in records
        ]
        # repr-precision floats round-trip exactly
        return json.dumps(payload, cls=NumpyJSONEncoder, indent=2) + '\n'
    raise ArgumentError(f'Unknown record format: {fmt!r}')


def emit_records(records, path, fmt=None):
    """
    Write records to path.

    Raises:
        CommandError: the file could not be written (path in the message)
    """
    path = Path(path)
    fmt = fmt or RecordFormat.from_path(path)
    text = records_to_text(records, fmt)
    try:
        path.write_text(text, encoding='utf-8')
    except OSError as exc:
        raise CommandError(f'Could not write records to {path}: {exc}', returncode=1) from exc
    logger.info('Wrote %d records to %s', len(records), path)


def _record_from_row(row):
    score = row.get('score')
    if score is not None and isinstance(score, float) and math.isnan(score):
        score = None
    return BenchmarkRecord(
        dist=str(row['dist']),
        d=int(row['d']),
        alpha=float(row['alpha']),
        epsilon=float(row['epsilon']),
        n=int(row['n']),
        seed=int(row['seed']),
        success=bool(row['success']),
        runtime_ms=float(row['runtime_ms']),
        score=None if score is None else float(score),
        adversary=str(row['adversary']),
        skipped=bool(row.get('skipped', False)),
        skip_reason=str(row.get('skip_reason') or ''),
    )


def parse_records(path, fmt=None):
    """
    Read records written by emit_records.

    Returns:
        list of unsaved BenchmarkRecord

    Raises:
        CommandError: missing or unreadable file
    """
    path = Path(path)
    fmt = fmt or RecordFormat.from_path(path)
    try:
        if fmt == RecordFormat.JSON:
            rows = json.loads(path.read_text(encoding='utf-8'))
        else:
            frame = pd.read_csv(
                path, dtype={'dist': str, 'adversary': str, 'seed': str},
                float_precision='round_trip',
            )
            missing = [c for c in RECORD_COLUMNS if c not in frame.columns]
            if missing:
                raise ArgumentError(f'{path} is missing columns: {", ".join(missing)}')
            rows = frame.to_dict(orient='records')
    except FileNotFoundError as exc:
        raise CommandError(f'Records file not found: {path}', returncode=1) from exc
    except (ArgumentError, OSError, ValueError, pd.errors.ParserError) as exc:
        raise CommandError(f'Could not read records from {path}: {exc}', returncode=1) from exc
    return [_record_from_row(row) for row in rows]
