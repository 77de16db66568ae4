#!/usr/bin/env python3
"""Run the replication study and write its CSV artifacts.

Any curvetail CLI flag passes through, e.g.:

    python scripts/run_study.py --seed 1729 --out results --jobs 4
    python scripts/run_study.py --config my_study.yaml
"""

import sys

from curvetail.cli import main

if __name__ == "__main__":
    sys.exit(main(["study", *sys.argv[1:]]))
