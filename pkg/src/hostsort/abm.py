"""Agent-based simulation of landlord policies and tenant re-sorting.

Each round runs five phases in order:

1. listing: tenants in allowing buildings whose reservation price is at or
   below the market price list;
2. price: tatonnement, ``p <- max(0, p + eta * (D(p) - listings))``;
3. rent: allowing buildings move their rent premium toward ``p - c n``;
4. policy: unregulated landlords switch toward the side paying more rent;
5. relocation: willing tenants in forbidding buildings swap places with
   unwilling tenants in allowing buildings when both sides accept.

Tenants value moves loss-aversely: a move happens iff
``gains - kappa >= lambda * losses`` (strictly for the party initiating it).
A forbidding landlord only expects to collect the premium that an incoming
listing tenant would accept under that rule, which is what makes moving costs
and loss aversion hold the share of allowing buildings below its frictionless
level.

Randomness in round ``r`` comes from ``numpy.random.default_rng([seed, r])`` so a
state plus its seed fully determines the next state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .curves import DemandCurve, LinearDemand, SupplyPropensity
from .equilibrium import DEFAULT_PRICE_CAP, MarketParams
from .errors import ConfigError


@dataclass(frozen=True)
class ABMConfig:
    #: tatonnement step; None picks 0.5 / |D'(p0)| at the starting price
    price_step: float | None = None
    moving_cost: float = 0.0
    loss_aversion: float = 1.0
    #: 0 = tenants placed uniformly at random, 1 = buildings homogeneous in type
    mixing_correlation: float = 0.0
    regulated_fraction: float = 0.0
    max_rounds: int = 500
    convergence_tol: float = 1e-6
    convergence_window: int = 50
    seed: int = 0
    #: share of the gap to ``p - c n`` closed by the rent premium each round
    rent_adjustment: float = 0.5
    #: landlord switching probability per unit of rent gap
    switch_rate: float = 0.25
    exploration_floor: float = 0.01
    #: rent gaps at or below this are treated as zero
    switch_tol: float = 1e-6
    initial_price: float | None = None
    #: starting price is P(A n * initial_supply_guess) unless initial_price is set
    initial_supply_guess: float = 0.5

    def __post_init__(self):
        def bad(name, bound):
            raise ConfigError(f"abm.{name} must be {bound}, got {getattr(self, name)!r}", field=name)

        if self.price_step is not None and not self.price_step > 0:
            bad("price_step", "> 0")
        if not self.moving_cost >= 0:
            bad("moving_cost", ">= 0")
        if not self.loss_aversion >= 1:
            bad("loss_aversion", ">= 1")
        if not 0 <= self.mixing_correlation <= 1:
            bad("mixing_correlation", "in [0, 1]")
        if not 0 <= self.regulated_fraction < 1:
            bad("regulated_fraction", "in [0, 1)")
        if isinstance(self.max_rounds, bool) or not isinstance(self.max_rounds, int) or self.max_rounds < 1:
            bad("max_rounds", "an integer >= 1")
        if not self.convergence_tol > 0:
            bad("convergence_tol", "> 0")
        if not isinstance(self.convergence_window, int) or self.convergence_window < 1:
            bad("convergence_window", "an integer >= 1")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            bad("seed", "a non-negative integer")
        if not 0 < self.rent_adjustment <= 1:
            bad("rent_adjustment", "in (0, 1]")
        if not self.switch_rate > 0:
            bad("switch_rate", "> 0")
        if not 0 <= self.exploration_floor <= 1:
            bad("exploration_floor", "in [0, 1]")
        if not self.switch_tol >= 0:
            bad("switch_tol", ">= 0")
        if self.initial_price is not None and not self.initial_price >= 0:
            bad("initial_price", ">= 0")
        if not 0 <= self.initial_supply_guess <= 1:
            bad("initial_supply_guess", "in [0, 1]")


@dataclass(frozen=True)
class Tenant:
    id: int
    reservation_price: float
    building_id: int
    is_listing: bool


@dataclass(frozen=True)
class Building:
    id: int
    policy: str  # "allow" | "forbid"
    regulated: bool
    rent_premium: float
    roster: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SortingState:
    """Full simulator state. Arrays are treated as immutable; ``step`` copies."""

    round: int
    price: float
    allow: np.ndarray  # (A,) bool
    regulated: np.ndarray  # (A,) bool
    rent_premium: np.ndarray  # (A,) float
    roster: np.ndarray  # (A, n) tenant ids
    reservation: np.ndarray  # (N,) float
    is_listing: np.ndarray  # (N,) bool
    rng_seed: int
    price_step: float
    moves: int = 0

    @property
    def theta(self) -> float:
        return float(self.allow.sum()) / len(self.allow)

    @property
    def listings(self) -> int:
        return int(self.is_listing.sum())

    @property
    def building_of(self) -> np.ndarray:
        out = np.empty(self.reservation.shape[0], dtype=np.int64)
        out[self.roster.ravel()] = np.repeat(np.arange(self.roster.shape[0]), self.roster.shape[1])
        return out

    @property
    def mean_rent_premium(self) -> float:
        if not self.allow.any():
            return 0.0
        return float(self.rent_premium[self.allow].mean())

    def tenants(self) -> list[Tenant]:
        where = self.building_of
        return [
            Tenant(i, float(self.reservation[i]), int(where[i]), bool(self.is_listing[i]))
            for i in range(len(self.reservation))
        ]

    def buildings(self) -> list[Building]:
        return [
            Building(
                b,
                "allow" if self.allow[b] else "forbid",
                bool(self.regulated[b]),
                float(self.rent_premium[b]),
                tuple(int(t) for t in self.roster[b]),
            )
            for b in range(len(self.allow))
        ]

    def same_as(self, other: "SortingState") -> bool:
        """Exact (bitwise) equality of every field."""
        return (
            self.round == other.round
            and self.price == other.price
            and self.rng_seed == other.rng_seed
            and self.price_step == other.price_step
            and self.moves == other.moves
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in ("allow", "regulated", "rent_premium", "roster", "reservation", "is_listing")
            )
        )


@dataclass
class ABMResult:
    final_state: SortingState
    rounds_used: int
    converged: bool
    theta_trajectory: list[float] = field(default_factory=list)
    price_trajectory: list[float] = field(default_factory=list)
    listings_trajectory: list[int] = field(default_factory=list)
    rent_trajectory: list[float] = field(default_factory=list)
    total_moves: int = 0

    def trajectory_rows(self) -> list[tuple[int, float, float, int, float]]:
        return [
            (r + 1, th, p, L, rent)
            for r, (th, p, L, rent) in enumerate(
                zip(
                    self.theta_trajectory,
                    self.price_trajectory,
                    self.listings_trajectory,
                    self.rent_trajectory,
                )
            )
        ]


def _auto_price_step(demand: DemandCurve, p0: float) -> float:
    # half of the step that would clear the market in one linearized move
    if isinstance(demand, LinearDemand):
        return 0.5 * demand.slope
    slope = demand.scale * -demand.elasticity * p0 ** (demand.elasticity - 1.0)
    if not math.isfinite(slope) or slope <= 0:
        raise ConfigError("cannot infer abm.price_step at the starting price; set it explicitly", field="price_step")
    return 0.5 / slope


def _assign_rosters(
    reservation: np.ndarray, price: float, params: MarketParams, rho: float, rng: np.random.Generator
) -> np.ndarray:
    n = params.tenants_per_building
    willing = int((reservation <= price).sum())
    if rho == 1 and willing % n != 0:
        raise ConfigError(
            f"mixing_correlation=1 needs the {willing} initially willing tenants to fill whole "
            f"buildings of {n}; lower mixing_correlation or change initial_price",
            field="mixing_correlation",
        )
    order = np.argsort(reservation, kind="stable")
    N = len(order)
    n_mixed = int(round((1.0 - rho) * N))
    if n_mixed > 1:
        slots = rng.choice(N, size=n_mixed, replace=False)
        order[slots] = order[rng.permutation(slots)]
    return order.reshape(params.num_buildings, n)


def init_state(
    params: MarketParams,
    demand: DemandCurve,
    f: SupplyPropensity,
    config: ABMConfig,
) -> SortingState:
    rng = np.random.default_rng([config.seed, 0])
    N = params.total_tenants
    A = params.num_buildings

    quantiles = (np.arange(N) + 0.5) / N
    reservation = np.array([f.reservation(u) for u in quantiles])[rng.permutation(N)]

    if config.initial_price is not None:
        price = float(config.initial_price)
    else:
        price = demand.inverse(N * config.initial_supply_guess)
        if not math.isfinite(price):
            raise ConfigError(
                "starting price is unbounded; set abm.initial_price or initial_supply_guess > 0",
                field="initial_price",
            )
    step_size = config.price_step if config.price_step is not None else _auto_price_step(demand, price)

    roster = _assign_rosters(reservation, price, params, config.mixing_correlation, rng)

    regulated = np.zeros(A, dtype=bool)
    n_regulated = int(round(config.regulated_fraction * A))
    if n_regulated:
        regulated[rng.choice(A, size=n_regulated, replace=False)] = True

    return SortingState(
        round=0,
        price=price,
        allow=np.zeros(A, dtype=bool),
        regulated=regulated,
        rent_premium=np.zeros(A),
        roster=roster,
        reservation=reservation,
        is_listing=np.zeros(N, dtype=bool),
        rng_seed=config.seed,
        price_step=step_size,
    )


def acceptance_premium(price: float, params: MarketParams, config: ABMConfig) -> float:
    """Largest rent premium a willing tenant accepts to move into a full allowing building.

    The mover gains ``price`` (plus any discount) and loses ``c n`` (plus any
    positive premium); losses are weighted by ``loss_aversion`` and the move
    must also cover ``moving_cost``.
    """
    lam, kappa = config.loss_aversion, config.moving_cost
    cost = params.social_cost
    surplus = price - kappa
    if surplus >= lam * cost:
        return surplus / lam - cost
    return surplus - lam * cost


def _listing_mask(state_allow, roster, reservation, price) -> np.ndarray:
    is_listing = np.zeros(reservation.shape[0], dtype=bool)
    members = roster[state_allow].ravel()
    is_listing[members] = reservation[members] <= price
    return is_listing


def update_policies(
    allow: np.ndarray,
    regulated: np.ndarray,
    rent_premium: np.ndarray,
    price: float,
    params: MarketParams,
    config: ABMConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """One round of landlord policy choices; returns new (allow, rent_premium)."""
    allow = allow.copy()
    rent = rent_premium.copy()
    free = ~regulated
    tol = config.switch_tol
    market = float(rent[allow].mean()) if allow.any() else price - params.social_cost
    value_allow = min(market, acceptance_premium(price, params, config))

    draws = rng.random(len(allow))
    prob = np.zeros(len(allow))
    to_allow = free & ~allow
    if value_allow > tol:
        prob[to_allow] = min(1.0, max(config.exploration_floor, config.switch_rate * value_allow))
    elif not (allow & free).any() and abs(value_allow) <= tol:
        # nothing to observe on the allow side yet
        prob[to_allow] = config.exploration_floor
    to_forbid = allow & (rent < -tol)
    prob[to_forbid] = np.minimum(1.0, np.maximum(config.exploration_floor, config.switch_rate * -rent[to_forbid]))

    flip = draws < prob
    rent[flip & to_allow] = value_allow
    rent[flip & to_forbid] = 0.0
    allow[flip] = ~allow[flip]
    allow &= free
    return allow, rent


def relocate(
    roster: np.ndarray,
    allow: np.ndarray,
    rent_premium: np.ndarray,
    reservation: np.ndarray,
    price: float,
    params: MarketParams,
    config: ABMConfig,
    rng: np.random.Generator,
    tie_tol: float = 1e-9,
) -> tuple[np.ndarray, int]:
    """Pairwise swaps of mismatched tenants; returns the new roster and swap count."""
    c = params.externality_cost
    lam, kappa = config.loss_aversion, config.moving_cost
    willing = reservation <= price

    in_allow = roster[allow]
    if in_allow.size == 0:
        return roster, 0
    allow_ids = np.flatnonzero(allow)
    # (building, slot) of unwilling tenants stuck in allowing buildings
    stuck = [
        (allow_ids[i], j)
        for i, row in enumerate(in_allow)
        for j, t in enumerate(row)
        if not willing[t]
    ]
    if not stuck:
        return roster, 0
    forbid_ids = np.flatnonzero(~allow)
    outside = [(b, j) for b in forbid_ids for j, t in enumerate(roster[b]) if willing[t]]
    if not outside:
        return roster, 0

    roster = roster.copy()
    stuck = [stuck[i] for i in rng.permutation(len(stuck))]
    outside = [outside[i] for i in rng.permutation(len(outside))]
    listers = {int(b): int(willing[roster[b]].sum()) for b in allow_ids}
    swaps = 0
    for b, j in stuck:
        if not outside:
            break
        k = listers[b]
        R = rent_premium[b]
        gain_leaver = c * k + max(R, 0.0)
        loss_leaver = max(-R, 0.0)
        gain_mover = price + max(-R, 0.0)
        loss_mover = c * (k + 1) + max(R, 0.0)
        net_leaver = gain_leaver - kappa - lam * loss_leaver
        net_mover = gain_mover - kappa - lam * loss_mover
        if net_leaver > tie_tol and net_mover >= -tie_tol:
            b2, j2 = outside.pop()
            roster[b, j], roster[b2, j2] = roster[b2, j2], roster[b, j]
            listers[b] = k + 1
            swaps += 1
    return roster, swaps


def step(
    state: SortingState,
    params: MarketParams,
    demand: DemandCurve,
    config: ABMConfig,
) -> SortingState:
    rng = np.random.default_rng([state.rng_seed, state.round + 1])

    # 1. listing decisions at the current price
    is_listing = _listing_mask(state.allow, state.roster, state.reservation, state.price)
    listings = int(is_listing.sum())

    # 2. tatonnement
    floor = 0.0 if math.isfinite(demand.quantity(0.0)) else 1e-9
    excess = demand.quantity(state.price) - listings
    price = min(DEFAULT_PRICE_CAP, max(floor, state.price + state.price_step * excess))

    # 3. rents in allowing buildings chase the listing tenants' surplus
    target = price - params.social_cost
    rent = np.where(
        state.allow,
        state.rent_premium + config.rent_adjustment * (target - state.rent_premium),
        0.0,
    )

    # 4. landlord policies
    allow, rent = update_policies(state.allow, state.regulated, rent, price, params, config, rng)

    # 5. tenant relocation
    roster, swaps = relocate(state.roster, allow, rent, state.reservation, price, params, config, rng)

    return replace(
        state,
        round=state.round + 1,
        price=price,
        allow=allow,
        rent_premium=rent,
        roster=roster,
        is_listing=_listing_mask(allow, roster, state.reservation, price),
        moves=state.moves + swaps,
    )


def run_to_convergence(
    state: SortingState,
    params: MarketParams,
    demand: DemandCurve,
    config: ABMConfig,
) -> ABMResult:
    """Step until theta is frozen and the price settled over the last window of rounds."""
    window = config.convergence_window
    thetas, prices, listings, rents = [], [], [], []
    converged = False
    prev_theta, prev_price = state.theta, state.price
    still = 0
    for _ in range(config.max_rounds):
        state = step(state, params, demand, config)
        thetas.append(state.theta)
        prices.append(state.price)
        listings.append(state.listings)
        rents.append(state.mean_rent_premium)
        if state.theta == prev_theta and abs(state.price - prev_price) <= config.convergence_tol:
            still += 1
        else:
            still = 0
        prev_theta, prev_price = state.theta, state.price
        if still >= window:
            converged = True
            break
    return ABMResult(
        final_state=state,
        rounds_used=len(thetas),
        converged=converged,
        theta_trajectory=thetas,
        price_trajectory=prices,
        listings_trajectory=listings,
        rent_trajectory=rents,
        total_moves=state.moves,
    )


def simulate(
    params: MarketParams,
    demand: DemandCurve,
    f: SupplyPropensity,
    config: ABMConfig,
) -> ABMResult:
    return run_to_convergence(init_state(params, demand, f, config), params, demand, config)


def _simulate_seed(args):
    params, demand, f, config, seed = args
    return simulate(params, demand, f, replace(config, seed=seed))


def simulate_seeds(
    params: MarketParams,
    demand: DemandCurve,
    f: SupplyPropensity,
    config: ABMConfig,
    seeds,
    workers: int | None = None,
) -> list[ABMResult]:
    """Independent runs, one per seed, returned in the order of ``seeds``."""
    jobs = [(params, demand, f, config, int(s)) for s in seeds]
    if not workers or workers == 1:
        return [_simulate_seed(j) for j in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_simulate_seed, jobs))
