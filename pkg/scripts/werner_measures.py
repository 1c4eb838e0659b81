"""Both quantumness measures along the two-qubit Werner family.

rho(x) = x |Phi+><Phi+| + (1 - x) I/4.  At x = 1 the geometric value is
checked against the Schmidt closed form.  Output is CSV on stdout.

    python3 scripts/werner_measures.py --points 21
"""

import argparse
import csv
import sys

import numpy as np

from qcnoise.measures import q_geometric, q_geometric_pure, q_relative_entropy
from qcnoise.numerics import DensityMatrix
from qcnoise.optimize import OptimizerConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--restarts", type=int, default=8)
    args = ap.parse_args()

    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    bell = np.outer(phi, phi)
    opt = OptimizerConfig(restarts=args.restarts)
    w = csv.writer(sys.stdout)
    w.writerow(["x", "q_geometric", "q_relative_entropy_bits"])
    for x in np.linspace(0, 1, args.points):
        rho = DensityMatrix(x * bell + (1 - x) * np.eye(4) / 4, (2, 2))
        w.writerow([f"{x:.4f}", f"{q_geometric(rho, opt).value:.8f}",
                    f"{q_relative_entropy(rho, opt).value:.8f}"])
        sys.stdout.flush()
    print(f"# closed form at x = 1: {q_geometric_pure(phi, (2, 2)):.8f}", file=sys.stderr)


if __name__ == "__main__":
    main()
