"""Correlations created by local phase damping on a qutrit, versus damping strength.

The input is the classically correlated qutrit-qubit state used by the
``qutrit-phase-damping`` repro case.  For each p the script prints the largest
commutator between the conditional qutrit states and both quantumness
measures of the output, as CSV.

    python3 scripts/qutrit_damping_scan.py --points 11 > scan.csv
"""

import argparse
import csv
import sys

import numpy as np

from qcnoise import channels as chn
from qcnoise.classicality import conditional_ensemble, max_commutator
from qcnoise.measures import q_geometric, q_relative_entropy
from qcnoise.optimize import OptimizerConfig
from qcnoise.repro import QUTRIT_PHI, QUTRIT_PSI, cq_state


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--restarts", type=int, default=8)
    args = ap.parse_args()

    rho = cq_state([0.5, 0.5], [QUTRIT_PSI, QUTRIT_PHI])
    opt = OptimizerConfig(restarts=args.restarts)
    w = csv.writer(sys.stdout)
    w.writerow(["p", "commutator", "q_geometric", "q_relative_entropy_bits"])
    for p in np.linspace(0, 1, args.points):
        out = chn.apply_local(chn.phase_damping(3, float(p)), rho, 0)
        comm = max_commutator(conditional_ensemble(out))
        qg = q_geometric(out, opt).value
        qs = q_relative_entropy(out, opt).value
        w.writerow([f"{p:.4f}", f"{comm:.6e}", f"{qg:.6e}", f"{qs:.6e}"])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
