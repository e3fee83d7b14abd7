"""
==============================================================================
CORE APP - BASE MANAGEMENT COMMAND
==============================================================================
Common plumbing for every ShiftRobust subcommand:
    - shared --config / --seed / --out flags
    - versioned JSON config loading
    - mapping of domain errors onto CommandError exit codes
      (1 = usage / argument, 2 = infeasible / resource)
    - writing JSON payloads to --out or stdout

Author: ShiftRobust Development Team
==============================================================================
"""

import logging
from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from core.exceptions import ShiftRobustError
from core.jsonio import dumps, load_config
from distributions.base import DistributionKind
from distributions.forms import distribution_from_payload

logger = logging.getLogger(__name__)

U64_MAX = 2**64 - 1


def seed_value(raw):
    """argparse type for --seed: an unsigned 64-bit integer."""
    value = int(raw)
    if not 0 <= value <= U64_MAX:
        raise ValueError(f'seed must be in [0, 2^64), got {raw}')
    return value


def form_errors_text(form):
    """Flatten a bound form's errors into one line."""
    parts = []
    for field, errors in form.errors.items():
        label = 'config' if field == '__all__' else field
        parts.append(f"{label}: {' '.join(str(e) for e in errors)}")
    return '; '.join(parts)


class ShiftRobustCommand(BaseCommand):
    """Base class for the ShiftRobust subcommands."""

    # Subclasses flip these off when a flag makes no sense for them
    accepts_config = True
    accepts_seed = True
    accepts_out = True
    accepts_dist = False
    # None leaves the seed to the config document
    seed_default = 0

    def add_arguments(self, parser):
        if self.accepts_config:
            parser.add_argument(
                '--config',
                help='Path to a JSON config document with "version": 1'
            )
        if self.accepts_seed:
            parser.add_argument(
                '--seed',
                type=seed_value,
                default=self.seed_default,
                help=(
                    'Master seed (unsigned 64-bit, default: 0)' if self.seed_default is not None
                    else 'Master seed (unsigned 64-bit); overrides master_seed in --config'
                )
            )
        if self.accepts_out:
            parser.add_argument(
                '--out',
                help='Write the result here instead of stdout'
            )
        if self.accepts_dist:
            parser.add_argument(
                '--dist',
                choices=DistributionKind.values,
                help='Base distribution kind (overrides "dist" in --config)'
            )
            parser.add_argument('--d', type=int, help='Dimension (default: 1)')
            parser.add_argument('--m', type=int, help='Summands for uniform_conv')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        """Hook for subcommand-specific flags."""

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except ShiftRobustError as exc:
            logger.debug('Command failed: %r', exc)
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        except ValidationError as exc:
            raise CommandError('; '.join(exc.messages), returncode=1) from exc

    # ==========================================================================
    # HELPERS
    # ==========================================================================

    def read_config(self, options, required=False):
        """Load --config if given; returns {} when absent and not required."""
        path = options.get('config')
        if not path:
            if required:
                raise CommandError('--config is required for this subcommand', returncode=1)
            return {}
        return load_config(path)

    def validated(self, form):
        """Return cleaned_data of a bound form or fail with exit code 1."""
        if not form.is_valid():
            raise CommandError(f'Invalid config: {form_errors_text(form)}', returncode=1)
        return form.cleaned_data

    def distribution(self, options, config):
        """BaseDistribution from --dist flags, else from the config's "dist" object."""
        if options.get('dist'):
            payload = {'kind': options['dist'], 'd': options.get('d') or 1, 'm': options.get('m') or 1}
        elif 'dist' in config:
            payload = config['dist']
        else:
            raise CommandError('A distribution is required (--dist or "dist" in --config)', returncode=1)
        return distribution_from_payload(payload)

    def option(self, options, config, name, required=True):
        """A flag value, falling back to the config key of the same name."""
        value = options.get(name)
        if value is None:
            value = config.get(name)
        if value is None and required:
            raise CommandError(f'--{name.replace("_", "-")} is required', returncode=1)
        return value

    def seed_override(self, options):
        """{'master_seed': --seed} when the flag was given, else {}."""
        seed = options.get('seed')
        return {} if seed is None else {'master_seed': seed}

    def emit_json(self, payload, options):
        """Write a JSON payload to --out (if given) or stdout."""
        self.emit_text(dumps(payload), options)

    def emit_text(self, text, options):
        """Write text to --out (if given) or stdout."""
        out = options.get('out')
        if out:
            path = Path(out)
            try:
                path.write_text(text + '\n', encoding='utf-8')
            except OSError as exc:
                raise CommandError(f'Could not write {path}: {exc}', returncode=1) from exc
            self.stderr.write(self.style.SUCCESS(f'Wrote {path}'))
        else:
            self.stdout.write(text)
