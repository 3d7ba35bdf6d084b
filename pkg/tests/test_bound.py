"""The certified floor under every admissible control's cost."""

import math

import numpy as np
import pytest

from sirlock import (
    CostParams,
    RegimeError,
    State,
    bound_objective,
    epsilon_constant,
    final_size,
    lower_bound,
    optimality_gaps,
    optimize_iota,
    optimize_rho,
    uncontrolled_peak,
)


def test_epsilon_squared_is_27_over_32():
    eps = epsilon_constant()
    assert eps * eps == pytest.approx(27.0 / 32.0, abs=1e-15)


def test_epsilon_inequality_pointwise():
    # 1 - sqrt(y) >= eps^2 (1-y)^2 for all y in [0, 1], tight at y = 1/9
    y = np.linspace(0.0, 1.0, 10_000)
    lhs = 1.0 - np.sqrt(y)
    rhs = (27.0 / 32.0) * (1.0 - y) ** 2
    assert np.all(lhs >= rhs - 1e-12)
    y_star = 1.0 / 9.0
    assert (1.0 - math.sqrt(y_star)) == pytest.approx((27.0 / 32.0) * (1.0 - y_star) ** 2, rel=1e-14)


def test_objective_term_identity(p, c, init):
    for i_star in (0.0, 0.05, 0.2):
        u, u12, u22, u3 = bound_objective(i_star, init, p, c)
        assert u == pytest.approx(2.0 * u12 + u22 + u3, rel=1e-14)


def test_objective_u12_vanishes_at_peak(p, c, init):
    i_max = uncontrolled_peak(init, p)
    _, u12, _, _ = bound_objective(i_max, init, p, c)
    assert abs(u12) <= 1e-12


def test_objective_fixed_point_self_consistency(p, c, init):
    i_star = 0.08
    thr = p.gamma / p.beta
    herd = State(0.0, thr, i_star, 1.0 - thr - i_star)
    s_inf, r_inf = final_size(herd, p)
    resid = r_inf - (1.0 - thr * math.exp(-(p.beta / p.gamma) * (r_inf - herd.r)))
    assert abs(resid) <= 1e-10
    _, _, _, u3 = bound_objective(i_star, init, p, c)
    assert u3 == pytest.approx(c.kappa * c.gamma0 * (r_inf - init.r) / p.gamma, rel=1e-10)


def test_objective_zero_at_quiet_threshold(p, c):
    thr = p.gamma / p.beta
    quiet = State(0.0, thr, 0.0, 1.0 - thr)
    u, u12, u22, u3 = bound_objective(0.0, quiet, p, c)
    assert u == 0.0 and u12 == 0.0 and u22 == 0.0 and u3 == 0.0


def test_objective_rejects_out_of_range(p, c, init):
    with pytest.raises(RegimeError):
        bound_objective(-0.01, init, p, c)
    with pytest.raises(RegimeError):
        bound_objective(uncontrolled_peak(init, p) + 0.01, init, p, c)


def test_lower_bound_frozen_value(p, c, init):
    res = lower_bound(init, p, c)
    assert res.c_star == pytest.approx(213.062195, rel=1e-6)
    assert res.i_star == pytest.approx(0.0, abs=1e-6)
    assert res.u22 == pytest.approx(0.0, abs=1e-9)
    assert res.c_star == pytest.approx(2.0 * res.u12 + res.u22 + res.u3, rel=1e-12)


def test_lower_bound_grid_consistency(p, c, init):
    # refinement can't sit above a plain scan of the objective
    res = lower_bound(init, p, c)
    grid = np.linspace(0.0, uncontrolled_peak(init, p), 2_000)
    scan = min(bound_objective(x, init, p, c)[0] for x in grid)
    assert res.c_star <= scan + 1e-9


def test_lower_bound_collapses_without_cost_weight(p, init):
    res = lower_bound(init, p, CostParams(kappa=0.0, gamma0=5.6e-4, gamma1=5.6e-3))
    assert res.c_star == 0.0


def test_lower_bound_requires_growth(p, c):
    below = State(0.0, 0.2, 0.01, 0.79)
    with pytest.raises(RegimeError):
        lower_bound(below, p, c)


def test_bound_sits_under_tuned_policies(p, c, init):
    res = lower_bound(init, p, c)
    _, cert_a = optimize_rho(init, p, c)
    _, cert_b = optimize_iota(init, p, c)
    assert res.c_star <= cert_b.cost.total <= cert_a.cost.total


def test_optimality_gaps_ordering(p, c, init):
    gap_a, gap_b = optimality_gaps(init, p, c)
    assert gap_a >= 0.0 and gap_b >= 0.0
    assert gap_b < gap_a


def test_bound_export_names_admissibility(p, c, init, tmp_path):
    import json

    res = lower_bound(init, p, c)
    d = res.to_dict()
    assert "herd-immunity" in d["note"]
    path = tmp_path / "bound.json"
    res.to_json(path)
    back = json.loads(path.read_text())
    assert back["c_star"] == pytest.approx(res.c_star)
    assert {"i_star", "u12", "u22", "u3", "s_inf", "r_inf"} <= set(back)
