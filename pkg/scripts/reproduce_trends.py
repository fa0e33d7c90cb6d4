#!/usr/bin/env python3
"""Reproduce the population-size trend study.

Sweeps the MU count over a fixed deployment area with all three content
delivery scenarios, writes the detail/summary CSVs, and prints the headline
quantities: per-MU throughput, energy efficiency against the multicast
baseline, the LP feasibility rate, and the mean cooperation threshold.

Usage:
    python scripts/reproduce_trends.py [--kmin 3] [--kmax 12] [--runs 100]
                                       [--seed 1] [--out trends.csv]
"""

import argparse
import sys

import numpy as np

from d2dlan import SessionConfig, monte_carlo
from d2dlan.cli import ExperimentSpec, run_experiment


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kmin", type=int, default=3)
    parser.add_argument("--kmax", type=int, default=12)
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--slots", type=int, default=10)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", default="trends.csv")
    args = parser.parse_args(argv)

    spec = ExperimentSpec(k_values=tuple(range(args.kmin, args.kmax + 1)),
                          runs=args.runs, slots=args.slots, seed=args.seed,
                          out=args.out)
    status = run_experiment(spec)
    if status != 0:
        return status

    print()
    print(f"{'K':>3} {'multicast':>12} {'mcrcd':>12} {'gain':>8} "
          f"{'feasible':>9} {'mean CEV':>9}")
    for k in spec.k_values:
        cfg = SessionConfig(mu_count=k, slot_count=args.slots,
                            master_seed=args.seed, runs=args.runs)
        mc = monte_carlo(cfg, scenarios=("multicast", "mcrcd"))
        eff_m = np.mean(mc.run_scalars("multicast", "efficiency_bpj"))
        eff_p = np.mean(mc.run_scalars("mcrcd", "efficiency_bpj"))
        feasible = np.mean(mc.run_scalars("mcrcd", "feasible"))
        cevs = mc.run_scalars("mcrcd", "cev")
        cev = np.mean(cevs) if cevs else float("nan")
        print(f"{k:>3} {eff_m:>12.4g} {eff_p:>12.4g} "
              f"{eff_p / eff_m - 1:>+7.1%} {feasible:>9.3f} {cev:>9.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
