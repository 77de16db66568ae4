#!/usr/bin/env python3
"""Write the synthetic dataset (curves.csv, responses.csv) for inspection.

    python scripts/generate_dataset.py --seed 1729 --out data
"""

import sys

from curvetail.cli import main

if __name__ == "__main__":
    sys.exit(main(["gen-data", *sys.argv[1:]]))
