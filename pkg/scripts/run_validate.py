"""Cross-pipeline checks (spectral, time-domain, grid); the exit status is nonzero on any failure."""

import sys
from pathlib import Path

from tunneltime.experiments import main

CONFIG = Path(__file__).with_name("default.cfg")

if __name__ == "__main__":
    raise SystemExit(main(["--config", str(CONFIG), "--pipelines", "spectral,time,grid", *sys.argv[1:], "validate"]))
