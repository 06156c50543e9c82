"""How much sorting the ABM needs as the host supply ramp gets steeper.

Narrower ramps mean more elastic supply. Reports rounds to convergence and
tenant moves; there is no pass/fail threshold here.
"""

import argparse

import numpy as np

from hostsort.abm import ABMConfig, simulate_seeds
from hostsort.curves import LinearSupply
from hostsort.scenario import load_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="scenarios/s0.yaml")
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--widths", type=float, nargs="+", default=[0.25, 0.5, 1.25, 2.5, 5.0])
    args = ap.parse_args()

    s = load_scenario(args.scenario)
    cfg = s.abm or ABMConfig()
    print("ramp_width,mean_theta,mean_price,converged_share,mean_rounds,mean_moves")
    for width in args.widths:
        supply = LinearSupply(0.0, width)
        runs = simulate_seeds(s.market, s.demand, supply, cfg, range(args.seeds))
        print(
            f"{width:g},{np.mean([r.final_state.theta for r in runs]):.4f},"
            f"{np.mean([r.final_state.price for r in runs]):.4f},"
            f"{np.mean([r.converged for r in runs]):.2f},"
            f"{np.mean([r.rounds_used for r in runs]):.1f},"
            f"{np.mean([r.total_moves for r in runs]):.1f}"
        )


if __name__ == "__main__":
    main()
