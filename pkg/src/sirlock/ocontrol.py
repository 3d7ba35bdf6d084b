"""Direct numerical solution of the finite-horizon lockdown control problem.

The control is piecewise constant on a uniform grid; the discretized cost is
minimized by projected gradient descent with exact adjoint gradients,
Barzilai-Borwein step proposals and Armijo backtracking, restarted from
several structurally different warm starts because the suppression and
mitigation regimes are separate basins.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from . import _ockern
from .analytic import optimize_iota, optimize_rho, uncontrolled_tail_cost
from .controls import PiecewiseConstantControl
from .errors import RegimeError
from .integrator import Trajectory, integrate, trajectory_cost
from .params import CostBreakdown, CostParams, EpidemicParams, State
from .policies import simulate_policy_a, simulate_policy_b

SUPPRESSION = "suppression"
MITIGATION = "mitigation"

MAX_ITER = 5000
COST_CHANGE_TOL = 1e-8
PROJ_GRAD_TOL = 1e-6
ARMIJO_C = 1e-4


@dataclass(frozen=True)
class OCResult:
    """Best local solution found: control values, re-simulated run, bookkeeping."""

    control_grid: np.ndarray
    trajectory: Trajectory
    cost: CostBreakdown
    regime: str
    converged: bool
    starts_tried: int
    t0: float
    horizon: float

    def piecewise(self) -> PiecewiseConstantControl:
        n = len(self.control_grid)
        edges = self.t0 + np.linspace(0.0, self.horizon, n + 1)
        return PiecewiseConstantControl(edges, self.control_grid)

    def summary_dict(self) -> dict:
        return {
            "cost": self.cost.to_dict(),
            "regime": self.regime,
            "converged": self.converged,
            "starts_tried": self.starts_tried,
            "horizon_days": self.horizon,
            "n_intervals": len(self.control_grid),
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary_dict(), fh, indent=2)
            fh.write("\n")


def classify_regime(trajectory: Trajectory, p: EpidemicParams) -> str:
    """Mitigation when the run reaches herd immunity within the horizon."""
    return MITIGATION if trajectory.min_s <= p.herd_immunity_threshold else SUPPRESSION


def cost_gradient(
    control_grid, init: State, p: EpidemicParams, c: CostParams, T: float
) -> np.ndarray:
    """Gradient of the discretized cost w.r.t. each interval's lockdown level."""
    u = np.ascontiguousarray(control_grid, dtype=float)
    grad, _ = _ockern.oc_gradient(
        u, init.s, init.i, p.beta, p.gamma, p.theta,
        c.kappa * c.gamma0, c.kappa * c.gamma1, T,
    )
    return grad


def lockdown_foi_correlation(trajectory: Trajectory, p: EpidemicParams) -> float:
    """Spearman correlation of L against the force of infection, a diagnostic.

    The true optimum is known to be monotone in beta*s*i; the discretized
    solution is only checked, never constrained.
    """
    foi = p.beta * trajectory.s * trajectory.i
    L = trajectory.L
    if np.ptp(L) == 0.0 or np.ptp(foi) == 0.0:
        return math.nan
    rho, _ = spearmanr(L, foi)
    return float(rho)


def infinite_horizon_cost(result: OCResult, p: EpidemicParams, c: CostParams) -> CostBreakdown:
    """Cost of the control extended by zero lockdown past the horizon.

    Adds the closed-form cost of the uncontrolled rundown from the terminal
    state, so a run that defers the epidemic past T is charged for it.
    """
    return result.cost + uncontrolled_tail_cost(result.trajectory.final_state, p, c)


def _solve_single(u0, fargs, l_max, max_iter):
    def F(u):
        return _ockern.oc_cost(u, *fargs)

    def G(u):
        return _ockern.oc_gradient(u, *fargs)

    u = np.clip(u0, 0.0, l_max)
    g, cost = G(u)
    s_prev = y_prev = None
    alpha = 1.0 / max(np.max(np.abs(g)), 1e-12)
    converged = False
    for _ in range(max_iter):
        pg = u - np.clip(u - g, 0.0, l_max)
        if np.linalg.norm(pg) < PROJ_GRAD_TOL:
            converged = True
            break
        if s_prev is not None:
            sy = float(s_prev @ y_prev)
            if sy > 1e-300:
                alpha = float(s_prev @ s_prev) / sy
            alpha = min(max(alpha, 1e-8), 1e4)

        accepted = False
        for _ in range(60):
            u_new = np.clip(u - alpha * g, 0.0, l_max)
            c_new = F(u_new)
            if c_new <= cost - ARMIJO_C * float(g @ (u - u_new)):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break

        g_new, _ = G(u_new)
        s_prev, y_prev = u_new - u, g_new - g
        rel = abs(cost - c_new) / max(1.0, abs(cost))
        u, cost, g = u_new, c_new, g_new
        if rel < COST_CHANGE_TOL:
            converged = True
            break
    return u, cost, converged


def _feedback_start(policy: str, init, p, c, T, mids) -> np.ndarray | None:
    try:
        if policy == "a":
            rho_star, _ = optimize_rho(init, p, c)
            run = simulate_policy_a(rho_star, init, p, c, init.t + T)
        else:
            iota_star, _ = optimize_iota(init, p, c)
            run = simulate_policy_b(iota_star, init, p, c, init.t + T)
    except (RegimeError, ValueError):
        return None
    traj = run.trajectory
    return np.interp(mids, traj.t, traj.L)


def solve_optimal_control(
    init: State,
    p: EpidemicParams,
    c: CostParams,
    T: float,
    n_intervals: int = 1000,
    warm_starts=None,
    max_iter: int = MAX_ITER,
) -> OCResult:
    """Minimize the discretized finite-horizon cost over piecewise-constant controls.

    Runs projected gradient descent from each warm start (defaults: no
    lockdown, full lockdown, and both tuned feedback policies sampled on the
    grid) and returns the best local solution, re-simulated with the
    adaptive integrator.
    """
    if not T > 0.0:
        raise ValueError(f"horizon must be positive, got {T}")
    if n_intervals < 50:
        raise ValueError(f"need at least 50 intervals, got {n_intervals}")

    fargs = (
        init.s, init.i, p.beta, p.gamma, p.theta,
        c.kappa * c.gamma0, c.kappa * c.gamma1, T,
    )
    mids = init.t + (np.arange(n_intervals) + 0.5) * (T / n_intervals)

    if warm_starts is None:
        starts = [np.zeros(n_intervals), np.full(n_intervals, p.l_max)]
        for policy in ("a", "b"):
            u0 = _feedback_start(policy, init, p, c, T, mids)
            if u0 is not None:
                starts.append(u0)
    else:
        starts = [np.ascontiguousarray(u, dtype=float) for u in warm_starts]
        if not starts:
            raise ValueError("warm_starts must contain at least one control grid")
        for u in starts:
            if u.shape != (n_intervals,):
                raise ValueError(f"warm start shape {u.shape} != ({n_intervals},)")

    best = None
    for u0 in starts:
        u, cost, converged = _solve_single(u0, fargs, p.l_max, max_iter)
        if best is None or cost < best[1]:
            best = (u, cost, converged)

    u, _, converged = best
    control = PiecewiseConstantControl(
        init.t + np.linspace(0.0, T, n_intervals + 1), u
    )
    trajectory = integrate(p, control, init, init.t + T)
    return OCResult(
        control_grid=u,
        trajectory=trajectory,
        cost=trajectory_cost(trajectory, c),
        regime=classify_regime(trajectory, p),
        converged=converged,
        starts_tried=len(starts),
        t0=init.t,
        horizon=T,
    )
