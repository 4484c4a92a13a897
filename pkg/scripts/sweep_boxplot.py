"""Random-scenario type-I-error sweep for boxplot rendering.

Draws admissible scenarios uniformly (difference and correlation in (-1, 1),
group-1 rate in (0, 1), sizes in [50, 150]) and estimates each test's
type-I error.  The CSV output has one row per scenario; plot the per-test
rate columns with any external tool.  Desk scale (default) is 2,000
scenarios at 10,000 replicates; the published-scale study (10,000 at
100,000) takes roughly 250x longer.

Usage:
    python scripts/sweep_boxplot.py [--count 2000] [--replicates 10000]
                                    [--seed 0] [--out sweep.csv] [--summary]
"""

import argparse

import numpy as np

from rhodiff import random_config_sweep
from rhodiff.inference import TEST_NAMES
from rhodiff.simulate import write_sweep_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=2000)
    parser.add_argument("--replicates", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--out", default="sweep.csv")
    parser.add_argument("--summary", action="store_true",
                        help="print per-test quartiles when done")
    args = parser.parse_args()

    def progress(done, total):
        if done % 100 == 0 or done == total:
            print(f"  {done}/{total}")

    results = random_config_sweep(args.count, seed=args.seed,
                                  replicates=args.replicates,
                                  alpha=args.alpha, progress=progress)
    write_sweep_csv(results, args.out)
    print(f"wrote {args.out}")

    if args.summary:
        for name in TEST_NAMES:
            rates = np.array([s.tests[name].rate for _, s in results])
            rates = rates[np.isfinite(rates)]
            q1, med, q3 = np.percentile(rates, [25, 50, 75])
            print(f"{name:>6}: median {med:.4f}  IQR [{q1:.4f}, {q3:.4f}] "
                  f"width {q3 - q1:.4f}")


if __name__ == "__main__":
    main()
