"""Dense j(0, t) trace at one barrier width (default L=5), with its zero crossing marked.

    python scripts/run_current_profile.py 8
"""

import sys
from pathlib import Path

from tunneltime.experiments import main

CONFIG = Path(__file__).with_name("default.cfg")

if __name__ == "__main__":
    L = sys.argv[1] if len(sys.argv) > 1 else "5"
    raise SystemExit(main(["--config", str(CONFIG), "current-profile", "--L", L]))
