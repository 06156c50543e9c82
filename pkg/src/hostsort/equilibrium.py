"""Closed-regime solvers.

Three outcomes are computed for a market of ``A`` buildings with ``n`` tenants
each, where every listing costs each tenant of its building ``c``:

* free listing: any willing tenant lists, price clears D(p) = A n f(p);
* owner-policy sorting: a share theta of buildings allow listing and rents
  equalize, so P(theta A n) = c n;
* the planner, who picks theta to maximize area-under-P minus c n per listing.

The sorting solver works on the indifference condition with a bracketing root
finder; the planner maximizes the welfare objective directly with golden-section
search. The two never share a code path, so agreement between them is a real
check rather than a tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy.optimize import brentq

from .curves import DemandCurve, SupplyPropensity, gross_benefit
from .errors import BracketError, ConfigError, NumericError, UnsupportedConfigurationError

DEFAULT_TOL = 1e-10
DEFAULT_PRICE_CAP = 1e6
_MAXITER = 1000

INTERIOR = "interior"
ALL_FORBID = "all_forbid"
ALL_ALLOW = "all_allow"


@dataclass(frozen=True)
class MarketParams:
    num_buildings: int
    tenants_per_building: int
    base_utility: float = 0.0
    externality_cost: float = 0.0

    def __post_init__(self):
        for name in ("num_buildings", "tenants_per_building"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {value!r}", field=name)
        for name in ("base_utility", "externality_cost"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}", field=name)
        if self.externality_cost < 0:
            raise ConfigError(
                f"externality_cost must be >= 0, got {self.externality_cost}",
                field="externality_cost",
            )

    @property
    def total_tenants(self) -> int:
        return self.num_buildings * self.tenants_per_building

    @property
    def social_cost(self) -> float:
        """Cost one listing imposes on its whole building, c * n."""
        return self.externality_cost * self.tenants_per_building


@dataclass(frozen=True)
class FreeListingEquilibrium:
    price: float
    listings: float
    excess_demand_residual: float


@dataclass(frozen=True)
class SortingEquilibrium:
    theta_star: float
    price: float
    listings: float
    corner: str


@dataclass(frozen=True)
class PlannerSolution:
    theta_opt: float
    welfare: float

    @property
    def corner(self) -> str:
        if self.theta_opt == 0.0:
            return ALL_FORBID
        if self.theta_opt == 1.0:
            return ALL_ALLOW
        return INTERIOR


def _finite(g: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(x: float) -> float:
        y = g(x)
        if not math.isfinite(y):
            raise NumericError(f"non-finite function value {y!r} at x={x!r}")
        return y

    return wrapped


def bracketed_root(g: Callable[[float], float], lo: float, hi: float, tol: float = DEFAULT_TOL) -> float:
    """Root of ``g`` on ``[lo, hi]`` by Brent's method.

    Raises ``BracketError`` if ``g(lo)`` and ``g(hi)`` share a strict sign and
    ``NumericError`` on any non-finite evaluation.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    g = _finite(g)
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0:
        return float(lo)
    if g_hi == 0:
        return float(hi)
    if g_lo * g_hi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: g={g_lo:.6g}, {g_hi:.6g}")
    try:
        return float(brentq(g, lo, hi, xtol=tol, maxiter=_MAXITER))
    except RuntimeError as exc:
        raise NumericError(f"root finder did not converge on [{lo}, {hi}]: {exc}") from exc


def golden_section_max(
    fun: Callable[[float], float], lo: float, hi: float, tol: float = 1e-9
) -> float:
    """Maximizer of a unimodal ``fun`` on ``[lo, hi]`` to bracket width ``tol``."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def _lower_bracket(g: Callable[[float], float], start: float) -> float:
    # walk down geometrically until g is positive; used where the curve has no finite value at 0
    x = start
    for _ in range(2000):
        y = g(x)
        if y > 0:
            if math.isfinite(y):
                return x
            break
        x *= 0.5
    raise NumericError(f"could not find a finite lower bracket below {start}")


def solve_free_listing(
    params: MarketParams,
    demand: DemandCurve,
    f: SupplyPropensity,
    tol: float = DEFAULT_TOL,
    price_cap: float = DEFAULT_PRICE_CAP,
) -> FreeListingEquilibrium:
    """Price at which guest demand equals the listings of all willing tenants."""
    N = params.total_tenants

    def excess(p: float) -> float:
        return demand.quantity(p) - N * f.fraction(p)

    hi = min(demand.choke_price, price_cap)
    g_hi = excess(hi)
    if g_hi > 0:
        raise NumericError(
            f"excess demand still positive at the price cap {price_cap}; raise solver.price_cap"
        )
    if math.isfinite(demand.quantity(0.0)):
        lo = 0.0
        if excess(lo) < 0:
            # supply at zero price already exceeds demand
            listings = N * f.fraction(0.0)
            return FreeListingEquilibrium(0.0, listings, demand.quantity(0.0) - listings)
    else:
        lo = _lower_bracket(excess, min(1.0, 0.5 * hi))

    p1 = bracketed_root(excess, lo, hi, tol)
    listings = N * f.fraction(p1)
    return FreeListingEquilibrium(p1, listings, demand.quantity(p1) - listings)


def solve_sorting_equilibrium(
    params: MarketParams, demand: DemandCurve, tol: float = DEFAULT_TOL
) -> SortingEquilibrium:
    """Share of allowing buildings at which tenants are indifferent across types."""
    N = params.total_tenants
    cost = params.social_cost
    p_empty = demand.inverse(0.0)
    p_full = demand.inverse(float(N))
    if p_empty < cost:
        return SortingEquilibrium(0.0, p_empty, 0.0, ALL_FORBID)
    if p_empty == cost:
        return SortingEquilibrium(0.0, cost, 0.0, INTERIOR)
    if p_full >= cost:
        return SortingEquilibrium(1.0, p_full, float(N), ALL_ALLOW)

    def gap(theta: float) -> float:
        return demand.inverse(theta * N) - cost

    lo = 0.0 if math.isfinite(p_empty) else _lower_bracket(gap, 0.5)
    theta = bracketed_root(gap, lo, 1.0, tol)
    return SortingEquilibrium(theta, demand.inverse(theta * N), theta * N, INTERIOR)


def planner_objective(params: MarketParams, demand: DemandCurve, theta: float) -> float:
    L = theta * params.total_tenants
    return gross_benefit(demand, L) - L * params.social_cost


def solve_planner_optimum(
    params: MarketParams, demand: DemandCurve, tol: float = 1e-9
) -> PlannerSolution:
    """Share of allowing buildings maximizing gross benefit net of externality cost."""
    if getattr(demand, "elasticity", -2.0) >= -1:
        raise UnsupportedConfigurationError(
            f"planner welfare is infinite for constant-elasticity demand with elasticity "
            f"{demand.elasticity} (area under inverse demand diverges); use elasticity < -1"
        )

    def W(theta: float) -> float:
        return planner_objective(params, demand, theta)

    theta = golden_section_max(W, 0.0, 1.0, tol)
    best, w_best = theta, W(theta)
    # the search never lands exactly on an endpoint; corners are checked explicitly
    for edge in (0.0, 1.0):
        w_edge = W(edge)
        if w_edge >= w_best:
            best, w_best = edge, w_edge
    return PlannerSolution(best, w_best)
