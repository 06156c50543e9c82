"""Mean final share of allowing buildings over a grid of moving costs and loss aversion."""

import argparse
from dataclasses import replace

import numpy as np

from hostsort.abm import ABMConfig, simulate_seeds
from hostsort.scenario import load_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="scenarios/s0.yaml")
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--kappa", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    ap.add_argument("--lam", type=float, nargs="+", default=[1.0, 2.0, 3.0])
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    s = load_scenario(args.scenario)
    base = s.abm or ABMConfig()
    print("kappa,lambda,mean_theta,converged_share,mean_rounds,mean_moves")
    for kappa in args.kappa:
        for lam in args.lam:
            cfg = replace(base, moving_cost=kappa, loss_aversion=lam)
            runs = simulate_seeds(s.market, s.demand, s.supply, cfg, range(args.seeds), workers=args.workers)
            theta = np.mean([r.final_state.theta for r in runs])
            conv = np.mean([r.converged for r in runs])
            rounds = np.mean([r.rounds_used for r in runs])
            moves = np.mean([r.total_moves for r in runs])
            print(f"{kappa:g},{lam:g},{theta:.4f},{conv:.2f},{rounds:.1f},{moves:.1f}")


if __name__ == "__main__":
    main()
