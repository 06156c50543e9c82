from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hostsort.abm import (
    ABMConfig,
    acceptance_premium,
    init_state,
    relocate,
    run_to_convergence,
    simulate,
    step,
    update_policies,
)
from hostsort.curves import LinearDemand
from hostsort.equilibrium import solve_sorting_equilibrium
from hostsort.errors import ConfigError


def _assert_conserved(state, params):
    A, n = params.num_buildings, params.tenants_per_building
    assert state.roster.shape == (A, n)
    assert sorted(state.roster.ravel().tolist()) == list(range(A * n))


def _assert_listing_invariant(state):
    where = state.building_of
    allowed = state.allow[where] & (state.reservation <= state.price)
    assert np.array_equal(state.is_listing, allowed)


def _equilibrium_state(params, demand, supply, config):
    """Hand-built state at the analytic sorting equilibrium of S0, fully sorted."""
    eq = solve_sorting_equilibrium(params, demand)
    state = init_state(params, demand, supply, config)
    k = round(eq.theta_star * params.num_buildings)
    order = np.argsort(state.reservation, kind="stable")  # lowest reservations host
    roster = order.reshape(state.roster.shape)
    allow = np.zeros(params.num_buildings, dtype=bool)
    allow[:k] = True
    price = params.social_cost
    is_listing = np.zeros_like(state.is_listing)
    is_listing[roster[allow].ravel()] = True
    return replace(state, price=price, allow=allow, roster=roster, is_listing=is_listing,
                   rent_premium=np.zeros(params.num_buildings))


# -- init --------------------------------------------------------------------


def test_init_counts(s0):
    state = init_state(*s0, ABMConfig(seed=7))
    assert len(state.tenants()) == 50
    assert len(state.buildings()) == 10
    assert all(len(b.roster) == 5 for b in state.buildings())
    _assert_conserved(state, s0[0])
    assert not state.allow.any() and state.theta == 0.0


def test_init_reservations_aggregate_to_supply(s0):
    params, _, f = s0
    state = init_state(*s0, ABMConfig(seed=3))
    expected = [f.reservation((i + 0.5) / 50) for i in range(50)]
    assert np.allclose(np.sort(state.reservation), expected, rtol=0, atol=1e-15)


def test_init_perfect_clustering(s0):
    state = init_state(*s0, ABMConfig(mixing_correlation=1.0, seed=1))
    willing = state.reservation <= state.price
    for row in state.roster:
        assert len(set(willing[row].tolist())) == 1


def test_init_infeasible_clustering(s0):
    # 22 tenants willing at p = 0.54 cannot fill whole buildings of 5
    with pytest.raises(ConfigError) as info:
        init_state(*s0, ABMConfig(mixing_correlation=1.0, initial_price=0.54))
    assert info.value.field == "mixing_correlation"


def test_init_deterministic(s0):
    a = init_state(*s0, ABMConfig(seed=7))
    b = init_state(*s0, ABMConfig(seed=7))
    c = init_state(*s0, ABMConfig(seed=8))
    assert a.same_as(b)
    assert not a.same_as(c)


def test_init_regulated_count(s0):
    state = init_state(*s0, ABMConfig(regulated_fraction=0.3))
    assert state.regulated.sum() == 3


def test_initial_price_and_auto_step(s0):
    state = init_state(*s0, ABMConfig())
    assert state.price == 1.0  # P(25)
    assert state.price_step == pytest.approx(0.02)


# -- step --------------------------------------------------------------------


def test_excess_listings_push_price_down(s0):
    params, demand, f = s0
    state = init_state(*s0, ABMConfig())
    state = replace(state, allow=np.ones(10, dtype=bool), price=1.9)
    assert state.reservation.max() <= 1.9  # every tenant lists, demand is 2.5
    nxt = step(state, params, demand, ABMConfig())
    assert nxt.price < state.price


def test_equilibrium_is_fixed_point(s0):
    params, demand, f = s0
    cfg = ABMConfig(seed=5)
    state = _equilibrium_state(params, demand, f, cfg)
    assert state.listings == 25
    nxt = step(state, params, demand, cfg)
    assert np.array_equal(nxt.allow, state.allow)
    assert np.array_equal(nxt.roster, state.roster)
    assert abs(nxt.price - state.price) <= 1e-12
    assert np.allclose(nxt.rent_premium, state.rent_premium, atol=1e-12)
    assert nxt.moves == 0
    for _ in range(30):
        nxt = step(nxt, params, demand, cfg)
    assert np.array_equal(nxt.allow, state.allow) and abs(nxt.price - 1.0) <= 1e-12


def test_exploration_floor_escapes_all_forbid(s0):
    params = s0[0]
    A = params.num_buildings
    allow = np.zeros(A, dtype=bool)
    regulated = np.zeros(A, dtype=bool)
    rent = np.zeros(A)
    # price == c n: no rent gap on either side
    flips = 0
    for seed in range(50):
        new, _ = update_policies(allow, regulated, rent, 1.0, params, ABMConfig(), np.random.default_rng(seed))
        flips += int(new.sum())
    assert flips > 0
    new, _ = update_policies(allow, regulated, rent, 1.0, params, ABMConfig(exploration_floor=0.0), np.random.default_rng(0))
    assert not new.any()


def test_regulated_buildings_never_allow(s0):
    params, _, f = s0
    demand = LinearDemand(5.0, 0.001)
    cfg = ABMConfig(regulated_fraction=0.5, seed=2)
    state = init_state(params, demand, f, cfg)
    for _ in range(100):
        state = step(state, params, demand, cfg)
        assert not (state.allow & state.regulated).any()
    assert state.theta <= 0.5


def test_acceptance_premium_frictionless_is_listing_surplus(s0_params):
    for p in (0.3, 1.0, 1.7):
        assert acceptance_premium(p, s0_params, ABMConfig()) == pytest.approx(p - s0_params.social_cost)


def test_acceptance_premium_falls_with_frictions(s0_params):
    base = acceptance_premium(1.5, s0_params, ABMConfig())
    assert acceptance_premium(1.5, s0_params, ABMConfig(moving_cost=0.5)) < base
    assert acceptance_premium(1.5, s0_params, ABMConfig(loss_aversion=2.0)) < base


def test_relocation_swaps_mismatched_pairs(s0):
    params, demand, f = s0
    state = init_state(*s0, ABMConfig(seed=4))
    allow = np.zeros(10, dtype=bool)
    allow[:5] = True
    roster, swaps = relocate(state.roster, allow, np.zeros(10), state.reservation, 1.0, params, ABMConfig(), np.random.default_rng(0))
    willing = state.reservation <= 1.0
    stuck_before = int((~willing[state.roster[allow]]).sum())
    assert swaps == stuck_before  # 15 willing outsiders is always enough
    assert willing[roster[allow]].all()
    assert sorted(roster.ravel().tolist()) == list(range(50))


def test_moving_cost_blocks_relocation(s0):
    params, demand, f = s0
    state = init_state(*s0, ABMConfig(seed=4))
    allow = np.zeros(10, dtype=bool)
    allow[:5] = True
    _, swaps = relocate(state.roster, allow, np.zeros(10), state.reservation, 1.0, params,
                        ABMConfig(moving_cost=5.0), np.random.default_rng(0))
    assert swaps == 0


# -- runs --------------------------------------------------------------------


def test_s0_run_converges_to_theta_star(s0):
    res = simulate(*s0, ABMConfig(seed=7))
    assert res.converged
    assert res.final_state.allow.sum() == 5
    assert abs(res.final_state.price - 1.0) <= 0.02
    assert len(res.theta_trajectory) == len(res.price_trajectory) == res.rounds_used


def test_rent_equalization_at_convergence(s0):
    params = s0[0]
    res = simulate(*s0, ABMConfig(seed=11))
    st_ = res.final_state
    assert res.converged
    surplus = st_.price - params.social_cost
    assert np.all(np.abs(st_.rent_premium[st_.allow] - surplus) <= 1e-6)
    assert abs(surplus) <= 1e-6


def test_run_sorts_tenants(s0):
    res = simulate(*s0, ABMConfig(seed=3))
    st_ = res.final_state
    willing = st_.reservation <= st_.price
    assert willing[st_.roster[st_.allow]].all()
    assert res.total_moves > 0


def test_trajectories_deterministic(s0):
    a = simulate(*s0, ABMConfig(seed=9, loss_aversion=1.5))
    b = simulate(*s0, ABMConfig(seed=9, loss_aversion=1.5))
    assert a.trajectory_rows() == b.trajectory_rows()
    assert a.final_state.same_as(b.final_state)


def test_non_convergence_is_reported(s0):
    res = simulate(*s0, ABMConfig(seed=7, max_rounds=20))
    assert res.rounds_used == 20 and not res.converged


def test_friction_direction_loss_aversion(s0):
    seeds = range(20)
    base = np.mean([simulate(*s0, ABMConfig(seed=s)).final_state.theta for s in seeds])
    averse = np.mean([simulate(*s0, ABMConfig(seed=s, loss_aversion=2.0, moving_cost=0.5)).final_state.theta for s in seeds])
    assert averse <= base


@settings(max_examples=20, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    kappa=st.sampled_from([0.0, 0.3, 1.0]),
    lam=st.sampled_from([1.0, 1.5, 3.0]),
    rho=st.sampled_from([0.0, 0.4, 0.9]),
    regulated=st.sampled_from([0.0, 0.3]),
)
def test_invariants_hold_every_round(s0, seed, kappa, lam, rho, regulated):
    params, demand, f = s0
    cfg = ABMConfig(seed=seed, moving_cost=kappa, loss_aversion=lam, mixing_correlation=rho, regulated_fraction=regulated)
    state = init_state(params, demand, f, cfg)
    for _ in range(40):
        state = step(state, params, demand, cfg)
        _assert_conserved(state, params)
        _assert_listing_invariant(state)
        assert not (state.allow & state.regulated).any()
        assert state.theta == state.allow.sum() / params.num_buildings
        assert state.price >= 0


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(loss_aversion=0.5), "loss_aversion"),
        (dict(moving_cost=-1.0), "moving_cost"),
        (dict(mixing_correlation=1.5), "mixing_correlation"),
        (dict(regulated_fraction=1.0), "regulated_fraction"),
        (dict(price_step=0.0), "price_step"),
        (dict(max_rounds=0), "max_rounds"),
    ],
)
def test_config_constraints(kwargs, field):
    with pytest.raises(ConfigError) as info:
        ABMConfig(**kwargs)
    assert info.value.field == field


def test_run_to_convergence_from_given_state(s0):
    params, demand, f = s0
    cfg = ABMConfig(seed=5)
    res = run_to_convergence(_equilibrium_state(params, demand, f, cfg), params, demand, cfg)
    assert res.converged and res.rounds_used == cfg.convergence_window
