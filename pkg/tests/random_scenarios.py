"""Seeded generator of valid random markets spanning interior and corner cases."""

import numpy as np

from hostsort.curves import ConstantElasticityDemand, LinearDemand, LinearSupply, LogisticSupply
from hostsort.equilibrium import MarketParams


def random_market(rng: np.random.Generator, family: str | None = None):
    A = int(rng.integers(1, 51))
    n = int(rng.integers(1, 21))
    N = A * n
    family = family or ("linear" if rng.random() < 0.5 else "constant_elasticity")
    if family == "linear":
        a = float(rng.uniform(0.5, 5.0))
        b = float(rng.uniform(0.2, 3.0)) * a / N  # choke quantity between N/3 and 5N
        demand = LinearDemand(a, b)
        cost = float(rng.uniform(0.0, 1.3 * a))
    else:
        eps = float(rng.uniform(-4.0, -1.1))
        k = float(10 ** rng.uniform(0.0, 3.0))
        demand = ConstantElasticityDemand(k, eps)
        cost = demand.inverse(float(N)) * float(10 ** rng.uniform(-0.7, 0.7))
    if rng.random() < 0.5:
        lo = float(rng.uniform(0.0, 1.0))
        supply = LinearSupply(lo, lo + float(rng.uniform(0.1, 3.0)))
    else:
        supply = LogisticSupply(float(rng.uniform(0.0, 3.0)), float(rng.uniform(0.5, 10.0)))
    params = MarketParams(A, n, float(rng.uniform(-5, 5)), cost / n)
    return params, demand, supply


def random_markets(count: int, seed: int = 2015, family: str | None = None):
    rng = np.random.default_rng(seed)
    return [random_market(rng, family) for _ in range(count)]
