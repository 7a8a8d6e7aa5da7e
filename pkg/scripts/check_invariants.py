"""Run the invariant suite at full desk resolution and 10^4 symmetrizer samples."""

import sys

from rigidlid.checks import run_all
from rigidlid.spectral import Grid

if __name__ == "__main__":
    results = run_all(Grid(), points=10_000)
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
