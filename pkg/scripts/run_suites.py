"""Run the randomized theorem suites and write one JSON report per suite.

    python3 scripts/run_suites.py --trials 20 --outdir reports/
"""

import argparse
import pathlib
import time

from qcnoise.optimize import OptimizerConfig
from qcnoise.repro import SUITES, theorem_suite
from qcnoise.serialize import dumps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("suites", nargs="*", default=list(SUITES), choices=SUITES)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=OptimizerConfig().restarts)
    ap.add_argument("--outdir", default="reports")
    args = ap.parse_args()

    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    opt = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    for which in args.suites:
        t0 = time.perf_counter()
        rep = theorem_suite(which, trials=args.trials, seed=args.seed, opt=opt)
        (out / f"{which}.json").write_text(dumps(rep.to_dict()))
        print(rep.table())
        print(f"  ({time.perf_counter() - t0:.1f} s)\n")


if __name__ == "__main__":
    main()
