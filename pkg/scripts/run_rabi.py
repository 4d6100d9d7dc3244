"""Two-level Rabi check: numeric TOA and QS distributions against their closed forms."""

import sys

from tunneltime.experiments import main

if __name__ == "__main__":
    raise SystemExit(main([*sys.argv[1:], "rabi"]))
