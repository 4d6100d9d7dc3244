"""Mean TF and QS times versus barrier width; writes out/fig2.csv and out/fig2.gp.

    python scripts/run_fig2.py [--pipelines spectral,time,grid] [--set L_values=2:14:2]
"""

import sys
from pathlib import Path

from tunneltime.experiments import main

CONFIG = Path(__file__).with_name("default.cfg")

if __name__ == "__main__":
    raise SystemExit(main(["--config", str(CONFIG), *sys.argv[1:], "fig2"]))
