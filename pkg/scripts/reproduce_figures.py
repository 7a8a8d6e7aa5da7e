"""Run the four rate studies (two data sets, two approximants each) and
write error tables, fitted slopes and final-time snapshots.

    python scripts/reproduce_figures.py --out results/
"""

import argparse
import sys

from rigidlid.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="results")
    ap.add_argument("--config", default=None, help="optional INI file overriding the defaults")
    args = ap.parse_args()
    argv = ["figures", "--out", args.out]
    if args.config:
        argv.insert(1, args.config)
    sys.exit(main(argv))
