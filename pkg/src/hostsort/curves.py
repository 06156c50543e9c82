"""Demand and supply-propensity curves for short-term rental listings.

Two demand families are supported:

* ``LinearDemand``: D(p) = max(0, (a - p) / b), P(q) = max(0, a - b q)
* ``ConstantElasticityDemand``: D(p) = k p**eps, P(q) = (q / k)**(1 / eps)

and two supply-propensity families giving the fraction f(p) of tenants who
would list at price p:

* ``LinearSupply``: a ramp clamped to [0, 1] between ``p_min`` and ``p_max``
* ``LogisticSupply``: 1 / (1 + exp(-s (p - m)))

All curve objects are frozen dataclasses; evaluation is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import ConfigError, DomainError, UnsupportedConfigurationError


def _check_finite(name: str, value: float) -> None:
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite number, got {value!r}", field=name)


def _check_price(p: float) -> None:
    if p < 0 or math.isnan(p):
        raise DomainError(f"price must be >= 0, got {p!r}")


def _check_quantity(q: float) -> None:
    if q < 0 or math.isnan(q):
        raise DomainError(f"quantity must be >= 0, got {q!r}")


@dataclass(frozen=True)
class LinearDemand:
    intercept: float  # choke price a
    slope: float  # price drop per extra listing, b > 0

    family = "linear"

    def __post_init__(self):
        _check_finite("intercept", self.intercept)
        _check_finite("slope", self.slope)
        if self.intercept <= 0:
            raise ConfigError(
                f"demand intercept must be > 0, got {self.intercept}", field="intercept"
            )
        if self.slope <= 0:
            raise ConfigError(
                f"demand slope must be > 0 (demand slopes down), got {self.slope}",
                field="slope",
            )

    @property
    def choke_price(self) -> float:
        return float(self.intercept)

    def quantity(self, p: float) -> float:
        _check_price(p)
        return max(0.0, (self.intercept - p) / self.slope)

    def inverse(self, q: float) -> float:
        _check_quantity(q)
        return max(0.0, self.intercept - self.slope * q)

    def gross_benefit(self, L: float) -> float:
        _check_quantity(L)
        # past the choke quantity the truncated inverse demand contributes nothing
        L = min(L, self.intercept / self.slope)
        return self.intercept * L - 0.5 * self.slope * L * L


@dataclass(frozen=True)
class ConstantElasticityDemand:
    scale: float  # k: listings demanded at unit price
    elasticity: float  # eps < 0

    family = "constant_elasticity"

    def __post_init__(self):
        _check_finite("scale", self.scale)
        _check_finite("elasticity", self.elasticity)
        if self.scale <= 0:
            raise ConfigError(f"demand scale must be > 0, got {self.scale}", field="scale")
        if self.elasticity >= 0:
            raise ConfigError(
                f"demand elasticity must be < 0, got {self.elasticity}", field="elasticity"
            )

    @property
    def choke_price(self) -> float:
        return math.inf

    def quantity(self, p: float) -> float:
        _check_price(p)
        if p == 0:
            return math.inf
        return self.scale * p**self.elasticity

    def inverse(self, q: float) -> float:
        """Price clearing ``q`` listings; ``math.inf`` at q = 0 (no choke price)."""
        _check_quantity(q)
        if q == 0:
            return math.inf
        return (q / self.scale) ** (1.0 / self.elasticity)

    def gross_benefit(self, L: float) -> float:
        _check_quantity(L)
        if self.elasticity >= -1:
            raise UnsupportedConfigurationError(
                f"area under inverse demand diverges for elasticity {self.elasticity} "
                "(needs elasticity < -1); use a more elastic or a linear demand curve"
            )
        if L == 0:
            return 0.0
        power = 1.0 + 1.0 / self.elasticity
        return self.scale ** (-1.0 / self.elasticity) * L**power / power


@dataclass(frozen=True)
class LinearSupply:
    p_min: float
    p_max: float

    family = "linear"

    def __post_init__(self):
        _check_finite("p_min", self.p_min)
        _check_finite("p_max", self.p_max)
        if self.p_min < 0:
            raise ConfigError(f"supply p_min must be >= 0, got {self.p_min}", field="p_min")
        if not self.p_min < self.p_max:
            raise ConfigError(
                f"supply ramp needs p_min < p_max, got [{self.p_min}, {self.p_max}]",
                field="p_max",
            )

    def fraction(self, p: float) -> float:
        _check_price(p)
        if p <= self.p_min:
            return 0.0
        if p >= self.p_max:
            return 1.0
        return (p - self.p_min) / (self.p_max - self.p_min)

    def reservation(self, u: float) -> float:
        """Price at which a tenant at population quantile ``u`` starts listing."""
        return self.p_min + u * (self.p_max - self.p_min)


@dataclass(frozen=True)
class LogisticSupply:
    midpoint: float
    steepness: float

    family = "logistic"

    def __post_init__(self):
        _check_finite("midpoint", self.midpoint)
        _check_finite("steepness", self.steepness)
        if self.steepness <= 0:
            raise ConfigError(
                f"supply steepness must be > 0, got {self.steepness}", field="steepness"
            )

    def fraction(self, p: float) -> float:
        _check_price(p)
        z = -self.steepness * (p - self.midpoint)
        if z > 700:
            return 0.0
        return 1.0 / (1.0 + math.exp(z))

    def reservation(self, u: float) -> float:
        # tenants below f(0) would list at any price; clamp them to zero
        if u <= 0:
            return 0.0
        if u >= 1:
            return math.inf
        return max(0.0, self.midpoint + math.log(u / (1.0 - u)) / self.steepness)


DemandCurve = Union[LinearDemand, ConstantElasticityDemand]
SupplyPropensity = Union[LinearSupply, LogisticSupply]


def demand_quantity(curve: DemandCurve, p: float) -> float:
    return curve.quantity(p)


def inverse_demand(curve: DemandCurve, q: float) -> float:
    return curve.inverse(q)


def supply_fraction(f: SupplyPropensity, p: float) -> float:
    return f.fraction(p)


def gross_benefit(curve: DemandCurve, L: float) -> float:
    """Area under the inverse demand curve between 0 and ``L`` listings."""
    return curve.gross_benefit(L)
