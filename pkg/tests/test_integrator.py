"""Integration engine: events, trajectory bookkeeping, cost quadrature."""

import math

import numpy as np
import pytest

from sirlock import (
    ConstantControl,
    CostParams,
    PiecewiseConstantControl,
    State,
    ThresholdEvent,
    Trajectory,
    conserved_quantity,
    integrate,
    integrate_to_rest,
    trajectory_cost,
    trajectory_to_csv,
)


def test_rejects_nonpositive_horizon(p, init):
    with pytest.raises(ValueError):
        integrate(p, ConstantControl(0.0), init, 0.0)


def test_simplex_and_monotonicity(p, init):
    traj = integrate(p, ConstantControl(0.0), init, 500.0)
    assert np.max(np.abs(traj.s + traj.i + traj.r - 1.0)) <= 1e-9
    assert np.all(np.diff(traj.s) <= 1e-12)
    assert np.all(np.diff(traj.r) >= -1e-12)


def test_conserved_quantity_drift(p, init):
    traj = integrate(p, ConstantControl(0.0), init, 800.0)
    v = traj.s + traj.i - (p.gamma / p.beta) * np.log(traj.s)
    assert np.ptp(v) <= 1e-8


def test_event_stops_at_threshold(p, init):
    ev = ThresholdEvent("s", 0.5, -1)
    traj = integrate(p, ConstantControl(0.0), init, 500.0, event=ev)
    assert traj.stopped_at_event
    assert abs(traj.final_state.s - 0.5) <= 1e-9
    assert traj.final_state.t < 500.0


def test_event_resume_does_not_refire(p, init):
    # restarting exactly on the threshold must integrate onward, not stop
    ev = ThresholdEvent("s", 0.5, -1)
    first = integrate(p, ConstantControl(0.0), init, 500.0, event=ev)
    second = integrate(p, ConstantControl(0.0), first.final_state, 500.0, event=ev)
    assert not second.stopped_at_event
    assert second.final_state.t == 500.0


def test_event_rising_direction(p, init):
    ev = ThresholdEvent("i", 0.2, 1)
    traj = integrate(p, ConstantControl(0.0), init, 500.0, event=ev)
    assert traj.stopped_at_event
    assert abs(traj.final_state.i - 0.2) <= 1e-9


def test_unreached_event_runs_to_horizon(p, init):
    ev = ThresholdEvent("i", 0.9, 1)
    traj = integrate(p, ConstantControl(0.0), init, 200.0, event=ev)
    assert not traj.stopped_at_event
    assert traj.final_state.t == 200.0


def test_piecewise_control_matches_callable(p, init):
    # the callable path steps across the level jumps, so it only agrees to
    # the local-error floor; the dedicated path splits at the knots
    ctl = PiecewiseConstantControl([0.0, 40.0, 120.0, 200.0], [0.0, 0.6, 0.2])
    fast = integrate(p, ctl, init, 200.0)
    slow = integrate(p, lambda t, st: ctl.level_at(t), init, 200.0)
    assert abs(fast.final_state.s - slow.final_state.s) <= 1e-6
    assert abs(fast.final_state.i - slow.final_state.i) <= 1e-6


def test_lockdown_column_reports_applied_level(p, init):
    # knot rows carry the left segment's level; strictly inside each piece
    # the column is exact
    ctl = PiecewiseConstantControl([0.0, 50.0, 100.0], [0.7, 0.1])
    traj = integrate(p, ctl, init, 100.0)
    assert np.all(traj.L[traj.t < 50.0] == 0.7)
    assert np.all(traj.L[traj.t > 50.0] == 0.1)


def test_trajectory_contiguity_enforced(p, init):
    a = integrate(p, ConstantControl(0.0), init, 50.0)
    b = integrate(p, ConstantControl(0.0), a.final_state, 100.0)
    joined = Trajectory.concat([a, b])
    assert joined.t0 == 0.0 and joined.t1 == 100.0
    assert np.all(np.diff(joined.t) > 0.0)

    late = integrate(
        p, ConstantControl(0.0), State(60.0, a.final_state.s, a.final_state.i, a.final_state.r), 100.0
    )
    with pytest.raises(ValueError):
        Trajectory.concat([a, late])


def test_economic_cost_constant_lockdown(p, init):
    # L = 0.5 over 10 days with negligible disease cost weight
    c = CostParams(kappa=0.0, gamma0=5.6e-4, gamma1=5.6e-3)
    traj = integrate(p, ConstantControl(0.5), init, 10.0)
    cost = trajectory_cost(traj, c)
    assert abs(cost.economic - 5.0) <= 1e-9
    assert cost.infected_linear == 0.0
    assert cost.infected_quadratic == 0.0
    assert cost.total == cost.economic


def test_infected_integral_matches_recovered_increment(p, init, c):
    # integral of i dt equals (r_end - r_start)/gamma regardless of lockdown
    ctl = PiecewiseConstantControl([0.0, 30.0, 90.0, 150.0], [0.0, 0.8, 0.3])
    traj = integrate(p, ctl, init, 150.0)
    cost = trajectory_cost(traj, c)
    int_i = cost.infected_linear / (c.kappa * c.gamma0)
    want = (traj.final_state.r - init.r) / p.gamma
    assert abs(int_i - want) / want <= 1e-7


def test_deaths_excluded_from_total(p, init, c):
    traj = integrate(p, ConstantControl(0.2), init, 100.0)
    cost = trajectory_cost(traj, c)
    assert cost.deaths > 0.0
    assert abs(cost.total - (cost.economic + cost.infected_linear + cost.infected_quadratic)) < 1e-12


def test_cost_additive_over_split(p, init, c):
    whole = trajectory_cost(integrate(p, ConstantControl(0.3), init, 80.0), c)
    first = integrate(p, ConstantControl(0.3), init, 37.0)
    rest = integrate(p, ConstantControl(0.3), first.final_state, 80.0)
    split = trajectory_cost(first, c) + trajectory_cost(rest, c)
    assert abs(whole.total - split.total) / whole.total <= 1e-9


def test_integrate_to_rest_reaches_quiet_state(p, init):
    traj = integrate_to_rest(p, ConstantControl(0.0), init)
    end = traj.final_state
    assert end.i <= 1e-9 or end.s <= p.gamma / p.beta + 1e-9


def test_trajectory_csv_columns(p, init, c, tmp_path):
    traj = integrate(p, ConstantControl(0.4), init, 25.0)
    path = tmp_path / "traj.csv"
    trajectory_to_csv(traj, path, c)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "t,s,i,r,L,R,R_L,cost_cum"
    first = [float(v) for v in rows[1].split(",")]
    assert first[0] == 0.0 and abs(first[1] - 0.98) < 1e-12
    last = [float(v) for v in rows[-1].split(",")]
    cost = trajectory_cost(traj, c)
    assert abs(last[-1] - cost.total) / cost.total <= 1e-6
    # R_L = R*(1-theta*L)^2 column consistency on the first row
    assert abs(first[6] - first[5] * (1.0 - p.theta * first[4]) ** 2) <= 1e-9


def test_zero_measure_state_never_negative(p):
    # drive infections to numerical extinction under full lockdown
    init = State(0.0, 0.5, 1e-7, 0.4999999)
    traj = integrate(p, ConstantControl(1.0), init, 400.0)
    assert np.all(traj.i >= 0.0)
    assert np.all(traj.s >= 0.0)
