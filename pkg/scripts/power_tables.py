"""Reproduce the empirical power tables (alternative difference vs null of
zero) over the standard scenario grid.  See tie_tables.py for scale notes.

Usage:
    python scripts/power_tables.py [--replicates 10000] [--seed 0] [--out-dir .]
"""

import argparse
import itertools
import time
from pathlib import Path

from rhodiff import SimConfig, estimate_power
from rhodiff.simulate import write_summary_csv

RHOS = (0.0, 0.5, 0.9)
PI1S = (0.1, 0.2, 0.3)
DELTAS = (0.1, 0.2, 0.3)
SIZES = (50, 100, 150)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replicates", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--out-dir", type=Path, default=Path("."))
    args = parser.parse_args()

    for rho in RHOS:
        summaries = []
        t0 = time.perf_counter()
        for pi1, delta1, m, n in itertools.product(PI1S, DELTAS, SIZES, SIZES):
            config = SimConfig(pi1=pi1, rho=rho, delta_true=delta1,
                               delta_null=0.0, m1=m, m2=m, n1=n, n2=n,
                               replicates=args.replicates, alpha=args.alpha,
                               seed=args.seed)
            summary = estimate_power(config)
            summaries.append(summary)
            rates = {k: f"{v.rate * 100:.2f}" for k, v in summary.tests.items()}
            print(f"rho={rho} pi1={pi1} d1={delta1} m={m} n={n}: {rates}")
        out = args.out_dir / f"power_rho{rho:g}.csv"
        write_summary_csv(summaries, out)
        print(f"wrote {out} ({time.perf_counter() - t0:.0f} s)")


if __name__ == "__main__":
    main()
