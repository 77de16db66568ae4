#!/usr/bin/env python3
"""Run the Monte Carlo validation suites and write asymptotics.csv.

Exits non-zero when any claim lands outside its tolerance, e.g.:

    python scripts/run_validation.py --seed 1729 --out results
"""

import sys

from curvetail.cli import main

if __name__ == "__main__":
    sys.exit(main(["validate", *sys.argv[1:]]))
