"""CmDE against its single-strategy components on sphere and Rosenbrock."""

from __future__ import annotations

import argparse

import numpy as np

from cmde_pricing.bench import SUITES, run_suite
from cmde_pricing.cmde import DEConfig, Strategy


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--population-size", type=int, default=200)
    ap.add_argument("--max-iterations", type=int, default=600)
    args = ap.parse_args(argv)
    cfg = DEConfig(population_size=args.population_size, max_iterations=args.max_iterations)
    for name, suite in SUITES.items():
        stats = run_suite(name, range(args.trials), cfg)
        rand1 = stats.per_strategy[Strategy.RAND1]
        print(f"{name}: CmDE hits {stats.success_count(suite.target)}/{args.trials} (target {suite.target:g}); "
              f"median CmDE {np.median(stats.cmde):.3e} vs rand/1 {np.median(rand1):.3e}; "
              f"CmDE median <= rand/1 median: {np.median(stats.cmde) <= np.median(rand1)}")
        for label, row in stats.summary().items():
            print(f"  {label:18s} " + " ".join(f"{k}={v:.3e}" for k, v in row.items()))


if __name__ == "__main__":
    main()
