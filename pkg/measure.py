#!/usr/bin/env python3
"""Entry point: ``python measure.py <command> ...`` (see ``--help``)."""
import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
