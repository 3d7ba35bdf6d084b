"""Controlled SIR vector field and the closed forms attached to it.

The model:

    ds/dt = -beta*(1 - theta*L)^2 * s * i
    di/dt =  beta*(1 - theta*L)^2 * s * i - gamma*i
    dr/dt =  gamma*i

with L in [0, l_max]. On uncontrolled stretches (L = 0) the quantity
s + i - (gamma/beta)*ln(s) is constant, which yields closed forms for the
final size, the infection peak, and the integral of i^2 between two points
of the same orbit.
"""

from __future__ import annotations

import math

from .errors import BracketError, RegimeError
from .numerics import Bracket, solve_scalar_root
from .params import EpidemicParams, State

_CLAMP_TOL = 1e-9  # slack accepted on L before raising


def clamp_lockdown(L: float, p: EpidemicParams) -> float:
    """Clamp L to [0, l_max]; reject values beyond roundoff outside it."""
    if L < -_CLAMP_TOL or L > p.l_max + _CLAMP_TOL:
        raise ValueError(f"lockdown level {L} outside [0, {p.l_max}]")
    return min(max(L, 0.0), p.l_max)


def derivative(state: State, L: float, p: EpidemicParams) -> tuple[float, float, float]:
    """Right-hand side (ds, di, dr) of the controlled model at `state`.

    dr is gamma*i and ds is the exact negative of di+dr, so the returned
    rates sum to zero.
    """
    L = clamp_lockdown(L, p)
    trans = p.effective_transmission(L) * state.s * state.i
    rec = p.gamma * state.i
    di = trans - rec
    return -(di + rec), di, rec


def reproduction_numbers(state: State, L: float, p: EpidemicParams) -> tuple[float, float]:
    """(R, R_L): basic and lockdown-reduced reproduction numbers at `state`.

    R = beta*s/gamma; R_L = beta*(1-theta*L)^2*s/gamma.
    """
    L = clamp_lockdown(L, p)
    R = p.beta * state.s / p.gamma
    u = 1.0 - p.theta * L
    return R, R * u * u


def conserved_quantity(state: State, p: EpidemicParams) -> float:
    """s + i - (gamma/beta)*ln(s), constant along uncontrolled orbits."""
    if state.s <= 0.0:
        raise ValueError(f"conserved quantity needs s > 0, got s={state.s}")
    return state.s + state.i - (p.gamma / p.beta) * math.log(state.s)


def final_size(state_a: State, p: EpidemicParams, tol: float = 1e-13) -> tuple[float, float]:
    """Asymptotic (s_inf, r_inf) of the uncontrolled flow started at state_a.

    r_inf is the unique root in (r(a), 1] of

        r = 1 - s(a) * exp(-(beta/gamma)*(r - r(a)))

    found by safeguarded Newton. With i(a) = 0 the state is already
    absorbing and (s(a), r(a)) is returned.
    """
    s_a, i_a, r_a = state_a.s, state_a.i, state_a.r
    if i_a == 0.0:
        return s_a, r_a
    if s_a == 0.0:
        # no susceptibles left: everyone currently infected recovers
        return 0.0, min(r_a + i_a, 1.0)

    ratio = p.beta / p.gamma

    def g(r: float) -> float:
        return 1.0 - s_a * math.exp(-ratio * (r - r_a)) - r

    def dg(r: float) -> float:
        return ratio * s_a * math.exp(-ratio * (r - r_a)) - 1.0

    hi = 1.0
    if g(hi) == 0.0:
        return 0.0, 1.0
    try:
        r_inf = solve_scalar_root(g, Bracket(r_a, hi), tol=tol, df=dg)
    except BracketError as exc:  # malformed state; g(r_a)=i(a)>0, g(1)<0 normally
        raise BracketError(f"final size bracketing failed: {exc}") from exc
    return 1.0 - r_inf, r_inf


def uncontrolled_peak(init: State, p: EpidemicParams) -> float:
    """Peak infected fraction of the uncontrolled epidemic from `init`.

    i_max = i0 + s0 - (gamma/beta)*(1 - ln(gamma/(beta*s0))) when
    beta*s0/gamma > 1, else i0 (infections only decline).
    """
    gb = p.gamma / p.beta
    if init.s <= gb:
        return init.i
    return init.i + init.s - gb * (1.0 - math.log(gb / init.s))


def integral_infected_squared_uncontrolled(
    state_a: State, state_b: State, p: EpidemicParams, orbit_tol: float = 1e-8
) -> float:
    """Closed-form integral of i(t)^2 between two points of one uncontrolled orbit.

        gamma*(ln^2 s(a) - ln^2 s(b))/(2 beta^2) - (s(a)-s(b))/beta
        + (s(a) + i(a) - (gamma/beta) ln s(a)) * (r(b) - r(a))/gamma

    Both states must carry the same conserved quantity (checked to orbit_tol)
    with state_b downstream of state_a.
    """
    if state_a.i == 0.0:
        # absorbing: the orbit is a single point
        if abs(state_b.s - state_a.s) > orbit_tol or abs(state_b.r - state_a.r) > orbit_tol:
            raise RegimeError("state_a has i=0; state_b must equal state_a")
        return 0.0
    if state_a.s <= 0.0:
        # pure decay i(t) = i(a) e^{-gamma t}: integral of i^2 down to i(b)
        return (state_a.i**2 - state_b.i**2) / (2.0 * p.gamma)
    va = conserved_quantity(state_a, p)
    vb = conserved_quantity(state_b, p)
    if abs(va - vb) > orbit_tol * max(1.0, abs(va)):
        raise RegimeError(
            f"states not on one uncontrolled orbit: conserved quantity drift {abs(va - vb):.3g}"
        )
    if state_b.s > state_a.s + orbit_tol:
        raise RegimeError("state_b precedes state_a on the orbit (s increased)")
    la, lb = math.log(state_a.s), math.log(state_b.s)
    term_log = p.gamma * (la * la - lb * lb) / (2.0 * p.beta * p.beta)
    term_s = -(state_a.s - state_b.s) / p.beta
    term_r = (state_a.s + state_a.i - (p.gamma / p.beta) * la) * (state_b.r - state_a.r) / p.gamma
    return term_log + term_s + term_r


def orbit_state_at_s(state_a: State, s: float, p: EpidemicParams, t: float = 0.0) -> State:
    """Point of state_a's uncontrolled orbit with susceptible fraction s.

    i follows from the conserved quantity; the time label is arbitrary (the
    closed forms never consume it).
    """
    if not 0.0 < s <= state_a.s:
        raise ValueError(f"s={s} not reachable downstream of s(a)={state_a.s}")
    i = conserved_quantity(state_a, p) - s + (p.gamma / p.beta) * math.log(s)
    if i < -1e-12:
        raise ValueError(f"s={s} lies past the end of the orbit (i({s})={i:.3g})")
    return State(t=t, s=s, i=max(i, 0.0), r=max(1.0 - s - max(i, 0.0), 0.0))
