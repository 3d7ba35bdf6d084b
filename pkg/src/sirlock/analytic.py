"""Closed-form infinite-horizon policy costs and scalar policy tuning.

Both certificates assume full lockdown effectiveness (theta = 1, l_max = 1),
the regime in which the closed forms hold; outside it, simulate instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

from scipy.integrate import quad

from .errors import RegimeError
from .model import final_size, integral_infected_squared_uncontrolled, uncontrolled_peak
from .numerics import Bracket, minimize_scalar, solve_scalar_root
from .params import CostBreakdown, CostParams, EpidemicParams, State


@dataclass(frozen=True)
class PolicyACertificate:
    """Closed-form evaluation of the reproduction-target policy at one rho."""

    rho: float
    t_star: float
    T1: float
    s_tstar: float
    i_tstar: float
    r_tstar: float
    s_inf: float
    r_inf: float
    nu: float
    nu_tilde: float
    cost: CostBreakdown

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cost"] = self.cost.to_dict()
        return d

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


@dataclass(frozen=True)
class PolicyBCertificate:
    """Closed-form evaluation of the prevalence-ceiling policy at one iota."""

    iota: float
    s_tau1: float
    tau1: float
    delta_tau: float
    s_inf: float
    r_inf: float
    cost: CostBreakdown

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cost"] = self.cost.to_dict()
        return d

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _require_full_effectiveness(p: EpidemicParams) -> None:
    if p.theta != 1.0 or p.l_max != 1.0:
        raise RegimeError(
            "closed-form costs hold only for theta = 1 and l_max = 1; simulate instead"
        )


def uncontrolled_tail_cost(state: State, p: EpidemicParams, c: CostParams) -> CostBreakdown:
    """Exact remaining cost of never locking down again from a given state.

    No economic term; the infection terms come from the recovered-mass
    identity (integral of i is (r_inf - r)/gamma) and the closed-form
    integral of i^2 along the uncontrolled orbit.
    """
    s_inf, r_inf = final_size(state, p)
    rest = State(math.inf, s_inf, 0.0, r_inf)
    int_i = (r_inf - state.r) / p.gamma
    int_i2 = integral_infected_squared_uncontrolled(state, rest, p)
    return CostBreakdown(
        economic=0.0,
        infected_linear=c.kappa * c.gamma0 * int_i,
        infected_quadratic=c.kappa * c.gamma1 * int_i2,
        deaths=c.gamma0 * int_i + c.gamma1 * int_i2,
    )


def cost_policy_a(
    rho: float, init: State, p: EpidemicParams, c: CostParams
) -> PolicyACertificate:
    """Infinite-horizon cost of the reproduction-target policy, in closed form.

    Phase I holds the controlled reproduction number at rho, so i grows at
    rate (rho-1)*gamma while s rides the line s + nu*i = nu_tilde; lockdown
    releases at s = gamma*rho/beta and the epidemic runs out uncontrolled.
    """
    _require_full_effectiveness(p)
    if not rho > 1.0:
        raise RegimeError(f"closed form needs rho > 1, got {rho}")
    if p.beta * init.s <= p.gamma * rho:
        raise RegimeError(
            f"no controlled phase: beta*s0/gamma = {p.beta * init.s / p.gamma:.6g} <= rho"
        )
    if init.i < 1e-12:
        raise RegimeError("economic cost diverges as i0 -> 0 (t* -> infinity)")

    lam = (rho - 1.0) * p.gamma
    nu = rho / (rho - 1.0)
    nu_tilde = init.s + nu * init.i
    t_star = math.log(1.0 - (rho * p.gamma - p.beta * init.s) / (p.beta * nu * init.i)) / lam

    s_tstar = p.gamma * rho / p.beta
    i_tstar = init.i * math.exp(lam * t_star)
    r_tstar = 1.0 - s_tstar - i_tstar

    # integral of sqrt(1 - L) over Phase I, along the orbit s = nu_tilde - nu*i
    pref = (2.0 / (rho - 1.0)) * math.sqrt(rho / (p.beta * nu_tilde * p.gamma))
    T1 = pref * (
        math.atanh(math.sqrt(init.s / nu_tilde))
        - math.atanh(math.sqrt(rho * p.gamma / (p.beta * nu_tilde)))
    )

    release = State(init.t + t_star, s_tstar, i_tstar, r_tstar)
    s_inf, r_inf = final_size(release, p)
    rest = State(math.inf, s_inf, 0.0, r_inf)

    int_i2_phase1 = (i_tstar**2 - init.i**2) / (2.0 * lam)
    int_i2_phase2 = integral_infected_squared_uncontrolled(release, rest, p)
    int_i = (r_inf - init.r) / p.gamma
    int_i2 = int_i2_phase1 + int_i2_phase2

    cost = CostBreakdown(
        economic=t_star - T1,
        infected_linear=c.kappa * c.gamma0 * int_i,
        infected_quadratic=c.kappa * c.gamma1 * int_i2,
        deaths=c.gamma0 * int_i + c.gamma1 * int_i2,
    )
    return PolicyACertificate(
        rho, t_star, T1, s_tstar, i_tstar, r_tstar, s_inf, r_inf, nu, nu_tilde, cost
    )


def _policy_b_s_tau1(iota: float, init: State, p: EpidemicParams) -> float:
    """Susceptibles when the prevalence first reaches iota, from the orbit."""
    if iota == init.i:
        return init.s
    thr = p.herd_immunity_threshold

    def h(s):
        return math.log(s / init.s) - (p.beta / p.gamma) * (s - init.s + iota - init.i)

    def dh(s):
        return 1.0 / s - p.beta / p.gamma

    return solve_scalar_root(h, Bracket(thr, init.s), tol=1e-13, df=dh)


def cost_policy_b(
    iota: float, init: State, p: EpidemicParams, c: CostParams
) -> PolicyBCertificate:
    """Infinite-horizon cost of the prevalence-ceiling policy, in closed form.

    Phase I rides the uncontrolled orbit up to i = iota, Phase II holds i
    there (s falls linearly at rate gamma*iota) until herd immunity, Phase
    III is the uncontrolled rundown.
    """
    _require_full_effectiveness(p)
    if not 0.0 < iota < 1.0:
        raise ValueError(f"iota must lie in (0, 1), got {iota}")
    thr = p.herd_immunity_threshold
    if init.s <= thr:
        raise RegimeError(
            f"already past herd immunity (s0 = {init.s:.6g} <= gamma/beta = {thr:.6g})"
        )
    if iota < init.i:
        raise RegimeError(f"closed form needs iota >= i0, got iota = {iota} < i0 = {init.i}")

    s_tau1 = _policy_b_s_tau1(iota, init, p)
    r_tau1 = 1.0 - s_tau1 - iota
    hold_start = State(init.t, s_tau1, iota, r_tau1)

    if iota == init.i:
        tau1 = 0.0
    else:
        # Phase I duration along the uncontrolled orbit: dt = -ds/(beta*s*i(s))
        gb = p.gamma / p.beta

        def inv_speed(s):
            i_of_s = init.i + init.s - s + gb * math.log(s / init.s)
            return 1.0 / (p.beta * s * i_of_s)

        tau1, _ = quad(inv_speed, s_tau1, init.s, epsabs=1e-12, epsrel=1e-11)

    delta_tau = (s_tau1 - thr) / (p.gamma * iota)

    release = State(init.t, thr, iota, 1.0 - thr - iota)
    s_inf, r_inf = final_size(release, p)
    rest = State(math.inf, s_inf, 0.0, r_inf)

    economic = (math.sqrt(s_tau1 / p.gamma) - math.sqrt(1.0 / p.beta)) ** 2 / iota
    int_i2 = (
        integral_infected_squared_uncontrolled(init, hold_start, p)
        + delta_tau * iota**2
        + integral_infected_squared_uncontrolled(release, rest, p)
    )
    int_i = (r_inf - init.r) / p.gamma

    cost = CostBreakdown(
        economic=economic,
        infected_linear=c.kappa * c.gamma0 * int_i,
        infected_quadratic=c.kappa * c.gamma1 * int_i2,
        deaths=c.gamma0 * int_i + c.gamma1 * int_i2,
    )
    return PolicyBCertificate(iota, s_tau1, tau1, delta_tau, s_inf, r_inf, cost)


def optimize_rho(
    init: State,
    p: EpidemicParams,
    c: CostParams,
    bracket: Bracket | None = None,
) -> tuple[float, PolicyACertificate]:
    """Minimize the closed-form policy A cost over rho by scan plus golden section."""
    r0 = p.beta * init.s / p.gamma
    if bracket is None:
        bracket = Bracket(1.0 + 1e-6, r0 * (1.0 - 1e-9))
    if not (bracket.lo > 1.0 and bracket.hi < r0):
        raise ValueError(f"bracket must lie inside (1, beta*s0/gamma) = (1, {r0:.6g})")

    def f(rho):
        return cost_policy_a(rho, init, p, c).cost.total

    rho_star, _ = minimize_scalar(f, bracket, tol=1e-6)
    return rho_star, cost_policy_a(rho_star, init, p, c)


def optimize_iota(
    init: State,
    p: EpidemicParams,
    c: CostParams,
    bracket: Bracket | None = None,
) -> tuple[float, PolicyBCertificate]:
    """Minimize the closed-form policy B cost over iota by scan plus golden section."""
    i_max = uncontrolled_peak(init, p)
    if bracket is None:
        bracket = Bracket(init.i, init.i + (i_max - init.i) * (1.0 - 1e-9))
    if not (bracket.lo >= init.i and bracket.hi <= i_max):
        raise ValueError(f"bracket must lie inside [i0, i_max] = [{init.i:.6g}, {i_max:.6g}]")

    def f(iota):
        return cost_policy_b(iota, init, p, c).cost.total

    iota_star, _ = minimize_scalar(f, bracket, tol=1e-6)
    return iota_star, cost_policy_b(iota_star, init, p, c)
