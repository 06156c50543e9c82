"""Scenario files, batch sweeps, tenant utility curves and CSV/JSON output.

A scenario is a YAML document (schema version 1)::

    schema_version: 1
    name: s0
    market: {num_buildings: 10, tenants_per_building: 5, base_utility: 10.0, externality_cost: 0.2}
    demand: {family: linear, intercept: 2.0, slope: 0.04}
    supply: {family: linear, p_min: 0.0, p_max: 1.25}
    solver: {tol: 1.0e-10}            # optional
    abm: {seed: 7}                    # optional, enables the simulator
    sweep: {parameter: market.externality_cost, values: [0.1, 0.2, 0.3]}  # optional

See ``docs/scenario-schema.md`` for every field and its default.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Iterable

import numpy as np
import yaml

from .abm import ABMConfig, ABMResult, simulate
from .curves import (
    ConstantElasticityDemand,
    DemandCurve,
    LinearDemand,
    LinearSupply,
    LogisticSupply,
    SupplyPropensity,
)
from .equilibrium import (
    DEFAULT_PRICE_CAP,
    DEFAULT_TOL,
    FreeListingEquilibrium,
    MarketParams,
    PlannerSolution,
    SortingEquilibrium,
    solve_free_listing,
    solve_planner_optimum,
    solve_sorting_equilibrium,
)
from .errors import ConfigError, HostsortError
from .welfare import RegimeComparison, Verdict, is_listing_efficient, welfare_at_listings

SCHEMA_VERSION = 1

DEMAND_FAMILIES = {"linear": LinearDemand, "constant_elasticity": ConstantElasticityDemand}
SUPPLY_FAMILIES = {"linear": LinearSupply, "logistic": LogisticSupply}

EQUILIBRIA_HEADER = [
    "theta_star",
    "p_sorting",
    "L_sorting",
    "corner",
    "theta_planner",
    "welfare_planner",
    "p_free",
    "L_free",
    "excess_demand_residual",
    "welfare_free",
    "welfare_sorting",
    "deadweight_loss",
    "overlisting",
    "free_verdict",
]
SWEEP_HEADER = [
    "swept_value",
    "theta_star",
    "p_sorting",
    "p_free",
    "L_free",
    "welfare_free",
    "welfare_sorting",
    "deadweight_loss",
    "corner",
]
TRAJECTORY_HEADER = ["round", "theta", "price", "listings", "mean_rent_premium"]
CURVES_HEADER = ["theta", "u_allow", "u_forbid"]


class ScenarioError(ConfigError):
    """Invalid scenario file; ``field`` is a dotted path, ``line`` is 1-based if known."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = ""
        if line is not None:
            where += f"line {line}: "
        if field is not None:
            where += f"{field}: "
        super().__init__(where + message, field=field)
        self.line = line


@dataclass(frozen=True)
class SolverConfig:
    tol: float = DEFAULT_TOL
    price_cap: float = DEFAULT_PRICE_CAP
    planner_tol: float = 1e-9
    verdict_tol: float = 1e-9

    def __post_init__(self):
        for f_ in fields(self):
            value = getattr(self, f_.name)
            if not value > 0:
                raise ConfigError(f"solver.{f_.name} must be > 0, got {value!r}", field=f_.name)


@dataclass(frozen=True)
class Sweep:
    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class Scenario:
    market: MarketParams
    demand: DemandCurve
    supply: SupplyPropensity
    solver: SolverConfig = field(default_factory=SolverConfig)
    abm: ABMConfig | None = None
    sweep: Sweep | None = None
    name: str = "scenario"
    schema_version: int = SCHEMA_VERSION


# ---------------------------------------------------------------------------
# parsing


def _number(value: Any, path: str) -> float | int:
    if isinstance(value, bool):
        raise ScenarioError(f"expected a number, got {value!r}", field=path)
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        # YAML 1.1 reads '1e-10' (no dot) as a string
        try:
            return float(value)
        except ValueError:
            pass
    raise ScenarioError(f"expected a number, got {value!r}", field=path)


def _coerce(cls, name: str, value: Any, path: str):
    if value is None:
        return None
    kind = {f_.name: f_.type for f_ in fields(cls)}[name]
    kind = kind if isinstance(kind, str) else getattr(kind, "__name__", str(kind))
    if kind.startswith("int"):
        num = _number(value, path)
        if isinstance(num, float):
            if not num.is_integer():
                raise ScenarioError(f"expected an integer, got {value!r}", field=path)
            num = int(num)
        return num
    return float(_number(value, path))


def _build(cls, data: Any, section: str, exclude: tuple[str, ...] = ()):
    if not isinstance(data, dict):
        raise ScenarioError("expected a mapping", field=section)
    known = {f_.name for f_ in fields(cls)}
    unknown = set(data) - known - set(exclude)
    if unknown:
        raise ScenarioError(
            f"unknown key(s) {sorted(unknown)}; expected some of {sorted(known)}", field=section
        )
    kwargs = {
        k: _coerce(cls, k, v, f"{section}.{k}") for k, v in data.items() if k not in exclude
    }
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        path = f"{section}.{exc.field}" if exc.field else section
        raise ScenarioError(str(exc), field=path) from exc
    except TypeError as exc:
        raise ScenarioError(str(exc), field=section) from exc


def _build_curve(data: Any, section: str, families: dict):
    if not isinstance(data, dict):
        raise ScenarioError("expected a mapping", field=section)
    family = data.get("family")
    if family not in families:
        raise ScenarioError(
            f"family must be one of {sorted(families)}, got {family!r}", field=f"{section}.family"
        )
    return _build(families[family], data, section, exclude=("family",))


_SECTIONS = ("market", "demand", "supply", "solver", "abm")


def _section_class(s: Scenario, section: str):
    return {
        "market": MarketParams,
        "demand": type(s.demand),
        "supply": type(s.supply),
        "solver": SolverConfig,
        "abm": ABMConfig,
    }[section]


def _check_sweep_path(s: Scenario, path: str) -> None:
    section, _, name = path.partition(".")
    if section not in _SECTIONS or not name:
        raise ScenarioError(
            f"parameter must look like '<section>.<field>' with section in {list(_SECTIONS)}, got {path!r}",
            field="sweep.parameter",
        )
    if section == "abm" and s.abm is None:
        raise ScenarioError("sweeping an abm parameter needs an abm block", field="sweep.parameter")
    if name not in {f_.name for f_ in fields(_section_class(s, section))}:
        raise ScenarioError(f"no parameter {path!r} in this scenario", field="sweep.parameter")


def scenario_from_dict(data: Any) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must be a mapping at the top level")
    allowed = {"schema_version", "name", "market", "demand", "supply", "solver", "abm", "sweep"}
    unknown = set(data) - allowed
    if unknown:
        raise ScenarioError(f"unknown top-level key(s) {sorted(unknown)}")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError(
            f"unsupported schema_version {version!r} (this build reads {SCHEMA_VERSION})",
            field="schema_version",
        )
    for required in ("market", "demand", "supply"):
        if required not in data:
            raise ScenarioError("missing required section", field=required)

    scenario = Scenario(
        market=_build(MarketParams, data["market"], "market"),
        demand=_build_curve(data["demand"], "demand", DEMAND_FAMILIES),
        supply=_build_curve(data["supply"], "supply", SUPPLY_FAMILIES),
        solver=_build(SolverConfig, data.get("solver") or {}, "solver"),
        abm=_build(ABMConfig, data["abm"] or {}, "abm") if "abm" in data else None,
        name=str(data.get("name", "scenario")),
    )
    if data.get("sweep") is not None:
        sweep = data["sweep"]
        if not isinstance(sweep, dict) or set(sweep) != {"parameter", "values"}:
            raise ScenarioError("sweep needs exactly 'parameter' and 'values'", field="sweep")
        values = sweep["values"]
        if not isinstance(values, list) or not values:
            raise ScenarioError("values must be a nonempty list", field="sweep.values")
        values = tuple(float(_number(v, f"sweep.values[{i}]")) for i, v in enumerate(values))
        _check_sweep_path(scenario, str(sweep["parameter"]))
        scenario = replace(scenario, sweep=Sweep(str(sweep["parameter"]), values))
        # every swept value must itself give a valid scenario
        for v in values:
            with_parameter(scenario, scenario.sweep.parameter, v)
    return scenario


def parse_scenario(text: str) -> Scenario:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(exc, "problem", None) or str(exc)
        raise ScenarioError(f"YAML parse error: {problem}", line=line) from exc
    return scenario_from_dict(data)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc.strerror}") from exc
    return parse_scenario(text)


def _curve_dict(curve) -> dict:
    return {"family": curve.family, **dataclasses.asdict(curve)}


def scenario_to_dict(s: Scenario) -> dict:
    out: dict[str, Any] = {
        "schema_version": s.schema_version,
        "name": s.name,
        "market": dataclasses.asdict(s.market),
        "demand": _curve_dict(s.demand),
        "supply": _curve_dict(s.supply),
        "solver": dataclasses.asdict(s.solver),
    }
    if s.abm is not None:
        out["abm"] = dataclasses.asdict(s.abm)
    if s.sweep is not None:
        out["sweep"] = {"parameter": s.sweep.parameter, "values": list(s.sweep.values)}
    return out


def dump_scenario(s: Scenario) -> str:
    """Canonical YAML for ``s``; ``parse_scenario(dump_scenario(s)) == s``."""
    return yaml.safe_dump(scenario_to_dict(s), sort_keys=False)


def with_parameter(s: Scenario, path: str, value: float) -> Scenario:
    """Copy of ``s`` with the dotted parameter ``path`` set to ``value`` (revalidated)."""
    section, _, name = path.partition(".")
    target = getattr(s, section)
    value = _coerce(type(target), name, value, path)
    try:
        return replace(s, **{section: replace(target, **{name: value})})
    except ConfigError as exc:
        raise ScenarioError(str(exc), field=path) from exc


# ---------------------------------------------------------------------------
# running


@dataclass
class ScenarioResult:
    free: FreeListingEquilibrium
    sorting: SortingEquilibrium
    planner: PlannerSolution
    comparison: RegimeComparison
    free_verdict: Verdict
    abm: ABMResult | None = None

    def equilibria_row(self) -> list:
        return [
            self.sorting.theta_star,
            self.sorting.price,
            self.sorting.listings,
            self.sorting.corner,
            self.planner.theta_opt,
            self.planner.welfare,
            self.free.price,
            self.free.listings,
            self.free.excess_demand_residual,
            self.comparison.welfare_free,
            self.comparison.welfare_sorting,
            self.comparison.deadweight_loss,
            self.comparison.overlisting,
            self.free_verdict.value,
        ]

    def summary(self) -> dict:
        out = {
            "free_listing": dataclasses.asdict(self.free),
            "sorting": dataclasses.asdict(self.sorting),
            "planner": {**dataclasses.asdict(self.planner), "corner": self.planner.corner},
            "comparison": dataclasses.asdict(self.comparison),
            "free_verdict": self.free_verdict.value,
        }
        if self.abm is not None:
            out["abm"] = abm_summary(self.abm)
        return out


def abm_summary(result: ABMResult) -> dict:
    st = result.final_state
    return {
        "seed": st.rng_seed,
        "converged": result.converged,
        "rounds_used": result.rounds_used,
        "final_theta": st.theta,
        "final_allowing_buildings": int(st.allow.sum()),
        "final_price": st.price,
        "final_listings": st.listings,
        "final_mean_rent_premium": st.mean_rent_premium,
        "total_moves": result.total_moves,
    }


def _closed_regimes(s: Scenario):
    params, demand, supply, sv = s.market, s.demand, s.supply, s.solver
    free = solve_free_listing(params, demand, supply, tol=sv.tol, price_cap=sv.price_cap)
    sort = solve_sorting_equilibrium(params, demand, tol=sv.tol)
    planner = solve_planner_optimum(params, demand, tol=sv.planner_tol)
    w_free = welfare_at_listings(params, demand, free.listings)
    w_sort = welfare_at_listings(params, demand, sort.listings)
    comparison = RegimeComparison(w_free, w_sort, w_sort - w_free, free.listings - sort.listings)
    verdict = is_listing_efficient(free.price, params, tol=sv.verdict_tol)
    return free, sort, planner, comparison, verdict


def run_scenario(s: Scenario, seed: int | None = None, run_abm: bool = True) -> ScenarioResult:
    """All closed-regime outputs, plus an ABM run when the scenario has an abm block."""
    try:
        free, sort, planner, comparison, verdict = _closed_regimes(s)
        result = ScenarioResult(free, sort, planner, comparison, verdict)
        if run_abm and s.abm is not None:
            cfg = s.abm if seed is None else replace(s.abm, seed=seed)
            result.abm = simulate(s.market, s.demand, s.supply, cfg)
    except HostsortError as exc:
        raise type(exc)(f"scenario {s.name!r}: {exc}") from exc
    return result


@dataclass(frozen=True)
class SweepRow:
    swept_value: float
    theta_star: float
    p_sorting: float
    p_free: float
    L_free: float
    welfare_free: float
    welfare_sorting: float
    deadweight_loss: float
    corner: str

    def as_list(self) -> list:
        return [getattr(self, name) for name in SWEEP_HEADER]


@dataclass(frozen=True)
class SweepTable:
    parameter: str
    rows: tuple[SweepRow, ...]

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def _sweep_row(args) -> SweepRow:
    s, value = args
    free, sort, _, comparison, _ = _closed_regimes(with_parameter(s, s.sweep.parameter, value))
    return SweepRow(
        swept_value=value,
        theta_star=sort.theta_star,
        p_sorting=sort.price,
        p_free=free.price,
        L_free=free.listings,
        welfare_free=comparison.welfare_free,
        welfare_sorting=comparison.welfare_sorting,
        deadweight_loss=comparison.deadweight_loss,
        corner=sort.corner,
    )


def run_sweep(s: Scenario, workers: int | None = None) -> SweepTable:
    """One independent closed-regime solve per swept value, in the given order."""
    if s.sweep is None:
        raise ScenarioError("scenario has no sweep block", field="sweep")
    jobs = [(s, v) for v in s.sweep.values]
    if workers and workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    return SweepTable(s.sweep.parameter, tuple(rows))


@dataclass(frozen=True)
class UtilityCurves:
    theta: np.ndarray
    u_allow: np.ndarray
    u_forbid: np.ndarray

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(t), float(a), float(b)) for t, a, b in zip(self.theta, self.u_allow, self.u_forbid)]

    def crossing_cells(self) -> list[int]:
        """Indices ``i`` where u_allow - u_forbid goes from >= 0 at i to < 0 at i + 1."""
        diff = self.u_allow - self.u_forbid
        return [i for i in range(len(diff) - 1) if diff[i] >= 0 > diff[i + 1]]


def emit_utility_curves(s: Scenario, grid_size: int = 101) -> UtilityCurves:
    """Tenant utility in allowing vs. forbidding buildings over theta in [0, 1]."""
    if grid_size < 2:
        raise ConfigError(f"grid_size must be >= 2, got {grid_size}", field="grid_size")
    m = s.market
    theta = np.linspace(0.0, 1.0, grid_size)
    u_allow = np.array(
        [m.base_utility + s.demand.inverse(t * m.total_tenants) - m.social_cost for t in theta]
    )
    return UtilityCurves(theta, u_allow, np.full(grid_size, float(m.base_utility)))


# ---------------------------------------------------------------------------
# output


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def write_csv(path: str | Path, header: list[str], rows: Iterable[Iterable]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    return path


def write_summary(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, allow_nan=True) + "\n")
    return path
