"""Closed-form policy costs against independent recomputation and simulation."""

import math

import pytest

from sirlock import (
    CostParams,
    EpidemicParams,
    RegimeError,
    State,
    cost_policy_a,
    cost_policy_b,
    final_size,
    optimize_iota,
    optimize_rho,
    simulate_policy_a,
    simulate_policy_b,
    uncontrolled_tail_cost,
)

TWENTY_YEARS = 7300.0


def _sim_cost_with_tail(run, p, c):
    return run.cost + uncontrolled_tail_cost(run.trajectory.final_state, p, c)


# ----------------------------------------------------------------- policy A


def test_policy_a_certificate_geometry(p, c, init):
    rho = 1.2
    cert = cost_policy_a(rho, init, p, c)

    nu = rho / (rho - 1.0)
    nu_tilde = init.s + nu * init.i
    assert cert.nu == pytest.approx(nu, rel=1e-14)
    assert cert.nu_tilde == pytest.approx(nu_tilde, rel=1e-14)

    # lockdown releases when the pinned reproduction number meets the
    # declining susceptible pool
    assert cert.s_tstar == pytest.approx(rho * p.gamma / p.beta, rel=1e-12)
    # prevalence at release from the invariant s + nu*i of the pinned phase
    assert cert.i_tstar == pytest.approx((nu_tilde - cert.s_tstar) / nu, rel=1e-10)

    lam = (rho - 1.0) * p.gamma
    t_star = math.log1p((p.beta * init.s - rho * p.gamma) / (p.beta * nu * init.i)) / lam
    assert cert.t_star == pytest.approx(t_star, rel=1e-10)
    assert cert.i_tstar == pytest.approx(init.i * math.exp(lam * t_star), rel=1e-10)

    k = math.sqrt(rho / (p.beta * nu_tilde * p.gamma))
    T1 = (2.0 / (rho - 1.0)) * k * (
        math.atanh(math.sqrt(init.s / nu_tilde))
        - math.atanh(math.sqrt(rho * p.gamma / (p.beta * nu_tilde)))
    )
    assert cert.T1 == pytest.approx(T1, rel=1e-10)
    assert cert.cost.economic == pytest.approx(t_star - T1, rel=1e-10)
    assert 0.0 < cert.T1 < cert.t_star

    s_inf, r_inf = final_size(State(0.0, cert.s_tstar, cert.i_tstar, cert.r_tstar), p)
    assert cert.s_inf == pytest.approx(s_inf, rel=1e-12)
    assert cert.r_inf == pytest.approx(r_inf, rel=1e-12)


def test_policy_a_matches_simulation(p, c, init):
    cert = cost_policy_a(1.5, init, p, c)
    run = simulate_policy_a(1.5, init, p, c, TWENTY_YEARS)
    sim = _sim_cost_with_tail(run, p, c)
    assert cert.cost.total == pytest.approx(sim.total, rel=1e-5)
    assert cert.cost.economic == pytest.approx(sim.economic, rel=1e-5)


def test_policy_a_frozen_costs(p, c, init):
    # regression anchors, cross-validated against long simulations
    want = {
        1.1: 303.22254253,
        1.2: 300.47308467,
        1.5: 352.56089766,
        2.0: 419.73707849,
        3.0: 469.67433878,
    }
    for rho, total in want.items():
        assert cost_policy_a(rho, init, p, c).cost.total == pytest.approx(total, rel=1e-6)


def test_policy_a_domain_errors(p, c, init):
    with pytest.raises(RegimeError):
        cost_policy_a(1.0, init, p, c)  # no release time for rho <= 1
    with pytest.raises(RegimeError):
        cost_policy_a(4.0, init, p, c)  # already below target
    with pytest.raises(RegimeError):
        cost_policy_a(1.2, State(0.0, 0.98, 0.0, 0.02), p, c)  # nothing to control
    weak = EpidemicParams(beta=0.2, gamma=1.0 / 18.0, theta=0.7)
    with pytest.raises(RegimeError):
        cost_policy_a(1.2, init, weak, c)  # closed forms need theta = 1


# ----------------------------------------------------------------- policy B


def test_policy_b_certificate_geometry(p, c, init):
    iota = 0.06
    cert = cost_policy_b(iota, init, p, c)

    # s at the start of the hold solves the uncontrolled orbit equation
    resid = math.log(cert.s_tau1 / init.s) - (p.beta / p.gamma) * (
        cert.s_tau1 - init.s + iota - init.i
    )
    assert abs(resid) <= 1e-10
    assert p.gamma / p.beta < cert.s_tau1 < init.s

    assert cert.delta_tau == pytest.approx(
        (cert.s_tau1 - p.gamma / p.beta) / (p.gamma * iota), rel=1e-12
    )
    econ = (math.sqrt(cert.s_tau1 / p.gamma) - math.sqrt(1.0 / p.beta)) ** 2 / iota
    assert cert.cost.economic == pytest.approx(econ, rel=1e-12)

    s_inf, r_inf = final_size(
        State(0.0, p.gamma / p.beta, iota, 1.0 - p.gamma / p.beta - iota), p
    )
    assert cert.s_inf == pytest.approx(s_inf, rel=1e-12)
    assert cert.r_inf == pytest.approx(r_inf, rel=1e-12)


def test_policy_b_frozen_values(p, c, init):
    cert = cost_policy_b(0.06, init, p, c)
    assert cert.s_tau1 == pytest.approx(0.909157, abs=5e-6)
    assert cert.tau1 == pytest.approx(13.2444, abs=5e-4)
    assert cert.delta_tau == pytest.approx(189.41377, rel=1e-6)

    want = {
        0.01: 511.62126926,
        0.03: 275.78732039,
        0.06: 249.26070825,
        0.10: 272.06032380,
    }
    for iota, total in want.items():
        assert cost_policy_b(iota, init, p, c).cost.total == pytest.approx(total, rel=1e-6)


def test_policy_b_matches_simulation(p, c, init):
    iota = 0.03
    cert = cost_policy_b(iota, init, p, c)
    run = simulate_policy_b(iota, init, p, c, TWENTY_YEARS)
    sim = _sim_cost_with_tail(run, p, c)
    assert cert.cost.total == pytest.approx(sim.total, rel=1e-5)
    assert cert.tau1 == pytest.approx(run.phase_end("I"), rel=1e-6)
    assert cert.delta_tau == pytest.approx(
        run.phase_end("II") - run.phase_end("I"), rel=1e-6
    )


def test_policy_b_instant_lockdown_when_starting_on_ceiling(p, c, init):
    cert = cost_policy_b(init.i, init, p, c)
    assert cert.tau1 == 0.0
    assert cert.s_tau1 == init.s


def test_policy_b_domain_errors(p, c, init):
    with pytest.raises(ValueError):
        cost_policy_b(0.0, init, p, c)
    with pytest.raises(ValueError):
        cost_policy_b(1.0, init, p, c)
    with pytest.raises(RegimeError):
        cost_policy_b(0.005, init, p, c)  # ceiling below current prevalence
    below = State(0.0, 0.2, 0.01, 0.79)
    with pytest.raises(RegimeError):
        cost_policy_b(0.06, below, p, c)  # already past herd immunity


# --------------------------------------------------------------------- tail


def test_tail_cost_identities(p, c):
    state = State(100.0, 0.5, 0.04, 0.46)
    tail = uncontrolled_tail_cost(state, p, c)
    s_inf, r_inf = final_size(state, p)
    assert tail.economic == 0.0
    assert tail.infected_linear == pytest.approx(
        c.kappa * c.gamma0 * (r_inf - state.r) / p.gamma, rel=1e-12
    )
    assert tail.deaths == pytest.approx(
        (c.gamma0 * (r_inf - state.r) / p.gamma)
        + c.gamma1 * tail.infected_quadratic / (c.kappa * c.gamma1),
        rel=1e-9,
    )
    assert tail.total > 0.0


def test_tail_cost_vanishes_at_rest(p, c):
    state = State(0.0, 0.2, 0.0, 0.8)
    tail = uncontrolled_tail_cost(state, p, c)
    assert tail.total == 0.0
    assert tail.deaths == 0.0


# ------------------------------------------------------------------- tuning


def test_optimize_rho_frozen_optimum(p, c, init):
    rho_star, cert = optimize_rho(init, p, c)
    assert rho_star == pytest.approx(1.150527, abs=1e-4)
    assert cert.cost.total == pytest.approx(297.416788, rel=1e-6)
    # optimum beats the scanned singles
    for rho in (1.1, 1.3, 2.0):
        assert cert.cost.total <= cost_policy_a(rho, init, p, c).cost.total + 1e-9


def test_optimize_iota_frozen_optimum(p, c, init):
    iota_star, cert = optimize_iota(init, p, c)
    assert iota_star == pytest.approx(0.055492, abs=1e-4)
    assert cert.cost.total == pytest.approx(248.850438, rel=1e-6)
    for iota in (0.02, 0.06, 0.10):
        assert cert.cost.total <= cost_policy_b(iota, init, p, c).cost.total + 1e-9


def test_certificate_serialization(p, c, init, tmp_path):
    import json

    cert = cost_policy_a(1.2, init, p, c)
    path = tmp_path / "a.json"
    cert.to_json(path)
    d = json.loads(path.read_text())
    assert d["rho"] == 1.2
    assert d["cost"]["total"] == pytest.approx(cert.cost.total)
