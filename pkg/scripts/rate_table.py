"""Print error tables and local slopes for every approximant.

Local slopes between neighbouring rho values show how far each sweep is
from its asymptotic rate.
"""

import numpy as np

from rigidlid.approx import ApproximantKind as K
from rigidlid.config import ExperimentConfig
from rigidlid.diagnostics import VARIABLES
from rigidlid.experiment import run_sweep


def show(sweep):
    for kind in sweep.kinds:
        table = sweep.tables[kind]
        print(f"\n{kind.value}")
        print("  gamma      rho       " + "  ".join(f"{v:>10}" for v in VARIABLES))
        for row in table.rows:
            print(f"  {row[0]:<8} {row[1]:.6f}  " + "  ".join(f"{e:10.3e}" for e in row[2:]))
        logr = np.log(table.rho)
        for v in VARIABLES:
            local = np.diff(np.log(table.errors(v))) / np.diff(logr)
            print(f"  local slopes {v:>6}: " + " ".join(f"{s:.2f}" for s in local))
        print("  fitted: " + " ".join(f"{k}={s:.3f}" for k, s in sweep.fits[kind].slopes.items()))


if __name__ == "__main__":
    show(run_sweep(ExperimentConfig(), [K.RL_ONLY, K.IMPROVED_WP]))
    ip = ExperimentConfig(scenario="ill_prepared", kind="ip_basic")
    show(run_sweep(ip, [K.IP_BASIC, K.IP_IMPROVED]))
