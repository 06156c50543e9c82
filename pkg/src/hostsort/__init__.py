"""Equilibrium solvers and an agent-based simulator for building-level
short-term-rental hosting policies with a noise externality on neighbors."""

from .abm import ABMConfig, ABMResult, SortingState, init_state, run_to_convergence, simulate, step
from .curves import (
    ConstantElasticityDemand,
    LinearDemand,
    LinearSupply,
    LogisticSupply,
    demand_quantity,
    gross_benefit,
    inverse_demand,
    supply_fraction,
)
from .equilibrium import (
    MarketParams,
    bracketed_root,
    solve_free_listing,
    solve_planner_optimum,
    solve_sorting_equilibrium,
)
from .scenario import Scenario, load_scenario, run_scenario, run_sweep, emit_utility_curves
from .welfare import Verdict, compare_regimes, is_listing_efficient, welfare_at_listings

__version__ = "0.1.0"
