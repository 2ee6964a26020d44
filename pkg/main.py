"""CLI entry point for forkcheck."""

from __future__ import annotations

import sys

from forkcheck.cli import main

if __name__ == "__main__":
    sys.exit(main())
