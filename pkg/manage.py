#!/usr/bin/env python
"""Entry point for the blockeig commands (solve, bench, explain_layout) and the test runner."""
import os
import sys


def main():
    """Dispatch to a management command."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the requirements with "
            "'pip install -r requirements.txt' inside an activated virtual environment."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
