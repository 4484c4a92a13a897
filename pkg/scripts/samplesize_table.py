"""Minimal common group sizes (m = n) for 80% power across the planning grid
of correlations, group-1 rates and effect sizes, one row per test.

Usage:
    python scripts/samplesize_table.py [--replicates 50000] [--seed 0] [--out table.csv]
"""

import argparse
import csv
import itertools
import time

from rhodiff import min_sample_size
from rhodiff.inference import TEST_NAMES

RHOS = (0.0, 0.2, 0.4, 0.6, 0.8)
PI1S = (0.1, 0.2, 0.3, 0.4, 0.5)
DELTAS = (0.1, 0.2, 0.3)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replicates", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--power", type=float, default=0.8)
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--out", default="samplesize.csv")
    args = parser.parse_args()

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rho", "pi1", "delta1"] + [f"n_{t}" for t in TEST_NAMES])
        for rho, pi1, delta1 in itertools.product(RHOS, PI1S, DELTAS):
            t0 = time.perf_counter()
            sizes = [min_sample_size(rho=rho, pi1=pi1, delta1=delta1,
                                     target_power=args.power, alpha=args.alpha,
                                     test=t, replicates=args.replicates,
                                     seed=args.seed) for t in TEST_NAMES]
            writer.writerow([rho, pi1, delta1] + sizes)
            fh.flush()
            print(f"rho={rho} pi1={pi1} d1={delta1}: {dict(zip(TEST_NAMES, sizes))} "
                  f"({time.perf_counter() - t0:.0f} s)")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
