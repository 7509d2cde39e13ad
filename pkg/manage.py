#!/usr/bin/env python
"""Entry point for the sphere-cone QMC commands and the test runner."""
import os
import sys


def main():
    """Run a management command (points, wce, price, table, ...)."""
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "SPHERECONE.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
