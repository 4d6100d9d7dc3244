"""First sign change of the entrance current j(0, t) for each barrier width."""

import sys
from pathlib import Path

from tunneltime.experiments import main

CONFIG = Path(__file__).with_name("default.cfg")

if __name__ == "__main__":
    raise SystemExit(main(["--config", str(CONFIG), "--set", "L_values=0:10:1", *sys.argv[1:], "zero-crossing"]))
