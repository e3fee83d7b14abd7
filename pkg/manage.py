#!/usr/bin/env python
"""ShiftRobust command-line utility: subcommands plus Django's own commands."""
import os
import sys


def main():
    """Run a ShiftRobust subcommand or an administrative task."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'shiftrobust.settings')
    try:
        import django
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc

    if len(sys.argv) > 1 and not sys.argv[1].startswith('-'):
        django.setup()
        from harness.cli import SUBCOMMANDS, cli_dispatch
        if sys.argv[1] in SUBCOMMANDS:
            sys.exit(cli_dispatch(sys.argv[1:]))
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
