"""Feedback lockdown policies and their phase-decomposed simulations.

Policy A holds the controlled reproduction number at a target rho until the
susceptible pool alone brings it there, then releases. Policy B pins the
infected fraction at a ceiling iota until herd immunity, then releases. The
force-of-infection law caps beta*(1-theta*L)^2*s*i at a constant, which
stabilizes i at phi/gamma.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _rk
from .errors import RegimeError
from .controls import ConstantControl
from .integrator import ThresholdEvent, Trajectory, integrate, trajectory_cost
from .params import CostBreakdown, CostParams, EpidemicParams, State

_PHASE_NAMES = {1: 1, 2: 2, 3: 3, "I": 1, "II": 2, "III": 3}


def policy_a_lockdown(state: State, rho: float, p: EpidemicParams) -> float:
    """Lockdown level that makes the controlled reproduction number rho.

    Solves beta*(1-theta*L)^2*s = gamma*rho for L; zero once the susceptible
    pool alone keeps the reproduction number at or below rho.
    """
    if not rho > 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    if p.beta * state.s <= p.gamma * rho:
        return 0.0
    L = (1.0 - math.sqrt(p.gamma * rho / (p.beta * state.s))) / p.theta
    return min(L, p.l_max)


def policy_b_lockdown(state: State, iota: float, p: EpidemicParams, phase) -> float:
    """Lockdown level of the prevalence-ceiling policy in a given phase.

    Phase I approaches the ceiling (no lockdown below it, full lockdown
    above), Phase II holds i constant by pinning the controlled reproduction
    number at one, Phase III is release.
    """
    if not 0.0 < iota < 1.0:
        raise ValueError(f"iota must lie in (0, 1), got {iota}")
    ph = _PHASE_NAMES.get(phase)
    if ph is None:
        raise ValueError(f"phase must be one of I, II, III (or 1, 2, 3), got {phase!r}")
    if ph == 1:
        return 0.0 if state.i < iota else p.l_max
    if ph == 3:
        return 0.0
    thr = p.herd_immunity_threshold
    if state.s < thr:
        raise RegimeError(
            f"hold-prevalence law needs s >= gamma/beta ({thr:.6g}), got s={state.s:.6g}"
        )
    if state.s == thr:
        return 0.0
    L = (1.0 - math.sqrt(p.gamma / (p.beta * state.s))) / p.theta
    return min(max(L, 0.0), p.l_max)


def force_of_infection_lockdown(state: State, phi: float, p: EpidemicParams) -> float:
    """Lockdown level capping the force of infection beta*(1-theta*L)^2*s*i at phi."""
    if not phi > 0.0:
        raise ValueError(f"phi must be positive, got {phi}")
    foi = p.beta * state.s * state.i
    if foi <= phi:
        return 0.0
    L = (1.0 - math.sqrt(phi / foi)) / p.theta
    return min(L, p.l_max)


class ReproductionTargetControl:
    """Policy A feedback law as a control signal."""

    def __init__(self, rho: float, p: EpidemicParams):
        if not rho > 0.0:
            raise ValueError(f"rho must be positive, got {rho}")
        self.rho = float(rho)
        self._p = p

    def __call__(self, t: float, state: State) -> float:
        return policy_a_lockdown(state, self.rho, self._p)

    def _kernel_spec(self, p: EpidemicParams) -> tuple[int, float]:
        return _rk.KIND_REPRO_TARGET, self.rho


class HoldPrevalenceControl:
    """Policy B Phase II law: pin the controlled reproduction number at one."""

    def __init__(self, p: EpidemicParams):
        self._p = p

    def __call__(self, t: float, state: State) -> float:
        p = self._p
        if p.beta * state.s <= p.gamma:
            return 0.0
        return min((1.0 - math.sqrt(p.gamma / (p.beta * state.s))) / p.theta, p.l_max)

    def _kernel_spec(self, p: EpidemicParams) -> tuple[int, float]:
        return _rk.KIND_HOLD_PREVALENCE, 0.0


class ForceOfInfectionControl:
    """Force-of-infection cap as a control signal; stabilizes i at phi/gamma."""

    def __init__(self, phi: float, p: EpidemicParams):
        if not phi > 0.0:
            raise ValueError(f"phi must be positive, got {phi}")
        self.phi = float(phi)
        self._p = p

    def __call__(self, t: float, state: State) -> float:
        return force_of_infection_lockdown(state, self.phi, self._p)

    def _kernel_spec(self, p: EpidemicParams) -> tuple[int, float]:
        return _rk.KIND_FOI_CAP, self.phi


@dataclass(frozen=True)
class PolicyRun:
    """A simulated policy: trajectory, phase decomposition and realized cost."""

    trajectory: Trajectory
    phase_times: tuple
    cost: CostBreakdown
    parameter: float
    saturated: bool = False

    def phase_end(self, label: str) -> float:
        for name, _, end in self.phase_times:
            if name == label:
                return end
        raise KeyError(f"no phase {label!r} in this run")

    def summary_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "phase_times": [
                {"phase": name, "start": start, "end": end}
                for name, start, end in self.phase_times
            ],
            "cost": self.cost.to_dict(),
            "saturated": self.saturated,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary_dict(), fh, indent=2)
            fh.write("\n")


def _law_clamped(segments, labels, desired_fn, l_max) -> bool:
    # A run saturates when the solve-for-L law wanted more lockdown than
    # l_max allows somewhere along its phase.
    for seg in segments:
        if seg.label not in labels:
            continue
        if np.any(desired_fn(seg.s) > l_max * (1.0 + 1e-12) + 1e-15):
            return True
    return False


def simulate_policy_a(
    rho: float,
    init: State,
    p: EpidemicParams,
    c: CostParams,
    t_end: float,
    tol: float = 1e-9,
) -> PolicyRun:
    """Run policy A to t_end: controlled phase until s = gamma*rho/beta, then release."""
    if not rho > 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    if not t_end > init.t:
        raise ValueError(f"t_end must exceed init.t ({t_end} <= {init.t})")
    tiny = 1e-12 * max(1.0, abs(t_end))

    pieces = []
    phase_times = []
    cur = init
    if p.beta * cur.s > p.gamma * rho:
        release_s = p.gamma * rho / p.beta
        traj = integrate(
            p,
            ReproductionTargetControl(rho, p),
            cur,
            t_end,
            tol,
            label="I",
            event=ThresholdEvent("s", release_s, -1),
        )
        pieces.append(traj)
        phase_times.append(("I", cur.t, traj.t1))
        cur = traj.final_state
    if t_end - cur.t > tiny:
        traj = integrate(p, ConstantControl(0.0), cur, t_end, tol, label="II")
        pieces.append(traj)
        phase_times.append(("II", cur.t, traj.t1))

    traj = pieces[0] if len(pieces) == 1 else Trajectory.concat(pieces)

    def desired(s):
        g = p.gamma * rho / (p.beta * np.maximum(s, 1e-300))
        return np.where(g < 1.0, (1.0 - np.sqrt(np.minimum(g, 1.0))) / p.theta, 0.0)

    saturated = _law_clamped(traj.segments, {"I"}, desired, p.l_max)
    return PolicyRun(traj, tuple(phase_times), trajectory_cost(traj, c), rho, saturated)


def simulate_policy_b(
    iota: float,
    init: State,
    p: EpidemicParams,
    c: CostParams,
    t_end: float,
    tol: float = 1e-9,
) -> PolicyRun:
    """Run policy B to t_end: approach the ceiling iota, hold it, release at herd immunity."""
    if not 0.0 < iota < 1.0:
        raise ValueError(f"iota must lie in (0, 1), got {iota}")
    if not t_end > init.t:
        raise ValueError(f"t_end must exceed init.t ({t_end} <= {init.t})")
    thr = p.herd_immunity_threshold
    tiny = 1e-12 * max(1.0, abs(t_end))

    pieces = []
    phase_times = []
    cur = init
    hold_ready = False

    if cur.s > thr:
        if cur.i == iota:
            phase_times.append(("I", cur.t, cur.t))
            hold_ready = True
        else:
            if cur.i < iota:
                law = ConstantControl(0.0)
                ev = ThresholdEvent("i", iota, +1)
            else:
                law = ConstantControl(p.l_max)
                ev = ThresholdEvent("i", iota, -1)
            traj = integrate(p, law, cur, t_end, tol, label="I", event=ev)
            pieces.append(traj)
            phase_times.append(("I", cur.t, traj.t1))
            hold_ready = traj.stopped_at_event
            cur = traj.final_state

    if hold_ready and cur.s > thr and t_end - cur.t > tiny:
        traj = integrate(
            p,
            HoldPrevalenceControl(p),
            cur,
            t_end,
            tol,
            label="II",
            event=ThresholdEvent("s", thr, -1),
        )
        pieces.append(traj)
        phase_times.append(("II", cur.t, traj.t1))
        released = traj.stopped_at_event
        cur = traj.final_state
    else:
        released = cur.s <= thr

    if released and t_end - cur.t > tiny:
        traj = integrate(p, ConstantControl(0.0), cur, t_end, tol, label="III")
        pieces.append(traj)
        phase_times.append(("III", cur.t, traj.t1))

    if not pieces:
        # Degenerate horizon: nothing to integrate beyond the initial instant.
        raise ValueError("horizon too short to simulate any phase")
    traj = pieces[0] if len(pieces) == 1 else Trajectory.concat(pieces)

    def desired(s):
        g = p.gamma / (p.beta * np.maximum(s, 1e-300))
        return np.where(g < 1.0, (1.0 - np.sqrt(np.minimum(g, 1.0))) / p.theta, 0.0)

    saturated = _law_clamped(traj.segments, {"II"}, desired, p.l_max)
    return PolicyRun(traj, tuple(phase_times), trajectory_cost(traj, c), iota, saturated)
