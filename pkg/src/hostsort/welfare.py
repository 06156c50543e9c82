"""Welfare accounting and the free-listing vs. sorting comparison.

Welfare at ``L`` listings is the area under inverse demand up to ``L`` minus the
externality, ``L * c * n``. Hosts' reservation values are not subtracted: the
host's private benefit from a listing is taken to be the price itself.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .curves import DemandCurve, SupplyPropensity, gross_benefit
from .equilibrium import (
    DEFAULT_TOL,
    MarketParams,
    solve_free_listing,
    solve_sorting_equilibrium,
)
from .errors import DomainError

# slack for L slightly above A*n from root-finder round-off
_RANGE_SLACK = 1e-9


class Verdict(str, enum.Enum):
    BENEFICIAL = "beneficial"
    MARGINAL = "marginal"
    HARMFUL = "harmful"


@dataclass(frozen=True)
class RegimeComparison:
    welfare_free: float
    welfare_sorting: float
    deadweight_loss: float
    overlisting: float  # L_free - L_sorting; positive means too much hosting


def welfare_at_listings(params: MarketParams, demand: DemandCurve, L: float) -> float:
    N = params.total_tenants
    if not (0.0 <= L <= N * (1 + _RANGE_SLACK)):
        raise DomainError(f"listings must lie in [0, {N}], got {L!r}")
    L = min(L, float(N))
    return gross_benefit(demand, L) - L * params.social_cost


def is_listing_efficient(p: float, params: MarketParams, tol: float = 1e-9) -> Verdict:
    """Compare a listing's private benefit ``p`` with its social cost ``c * n``."""
    if p < 0:
        raise DomainError(f"price must be >= 0, got {p!r}")
    cost = params.social_cost
    if p > cost + tol:
        return Verdict.BENEFICIAL
    if p < cost - tol:
        return Verdict.HARMFUL
    return Verdict.MARGINAL


def compare_regimes(
    params: MarketParams,
    demand: DemandCurve,
    f: SupplyPropensity,
    tol: float = DEFAULT_TOL,
    price_cap: float | None = None,
) -> RegimeComparison:
    kwargs = {} if price_cap is None else {"price_cap": price_cap}
    free = solve_free_listing(params, demand, f, tol=tol, **kwargs)
    sort = solve_sorting_equilibrium(params, demand, tol=tol)
    w_free = welfare_at_listings(params, demand, free.listings)
    w_sort = welfare_at_listings(params, demand, sort.listings)
    return RegimeComparison(
        welfare_free=w_free,
        welfare_sorting=w_sort,
        deadweight_loss=w_sort - w_free,
        overlisting=free.listings - sort.listings,
    )
