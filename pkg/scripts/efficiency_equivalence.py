"""Compare the sorting equilibrium with the planner optimum on random markets."""

import argparse
import sys
from pathlib import Path

from hostsort.equilibrium import INTERIOR, solve_planner_optimum, solve_sorting_equilibrium
from hostsort.welfare import compare_regimes

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from random_scenarios import random_markets  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2015)
    args = ap.parse_args()

    worst_gap, worst_dwl, mismatches, labels = 0.0, 0.0, 0, {}
    for params, demand, supply in random_markets(args.count, seed=args.seed):
        sort = solve_sorting_equilibrium(params, demand)
        plan = solve_planner_optimum(params, demand)
        labels[sort.corner] = labels.get(sort.corner, 0) + 1
        gap = abs(plan.theta_opt - sort.theta_star)
        if sort.corner == INTERIOR:
            worst_gap = max(worst_gap, gap)
        elif sort.corner != plan.corner and gap > 1e-6:
            mismatches += 1
        worst_dwl = min(worst_dwl, compare_regimes(params, demand, supply).deadweight_loss)

    print(f"markets: {args.count}  {labels}")
    print(f"worst interior |theta_planner - theta_star|: {worst_gap:.3e}")
    print(f"corner mismatches: {mismatches}")
    print(f"smallest deadweight loss: {worst_dwl:.3e}")


if __name__ == "__main__":
    main()
