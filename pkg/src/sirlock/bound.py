"""Certified lower bound on the cost of admissible lockdown controls.

Admissible means no lockdown from the herd-immunity time onward; every bound
reported here is against that class, not unrestricted controls. The bound
splits the cost on either side of the herd-immunity time, relaxes the
lockdown term through the scalar inequality 1 - sqrt(y) >= eps^2 (1-y)^2,
and minimizes over the one free parameter left: the prevalence i* at the
herd-immunity time.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

from .errors import RegimeError
from .model import final_size, integral_infected_squared_uncontrolled, uncontrolled_peak
from .numerics import Bracket, minimize_scalar
from .params import CostParams, EpidemicParams, State

ADMISSIBILITY_NOTE = (
    "lower bound over controls with no lockdown after the herd-immunity time"
)


def epsilon_constant() -> float:
    """The largest eps with 1 - sqrt(y) >= eps^2 (1-y)^2 on [0, 1]: sqrt(27/32)."""
    return math.sqrt(27.0 / 32.0)


@dataclass(frozen=True)
class BoundResult:
    """Lower bound value with its minimizer and term decomposition."""

    c_star: float
    i_star: float
    u12: float
    u22: float
    u3: float
    s_inf: float
    r_inf: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["note"] = ADMISSIBILITY_NOTE
        return d

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _herd_state(i_star: float, p: EpidemicParams) -> State:
    thr = p.herd_immunity_threshold
    return State(0.0, thr, i_star, 1.0 - thr - i_star)


def bound_objective(
    i_star: float, init: State, p: EpidemicParams, c: CostParams
) -> tuple[float, float, float, float]:
    """Evaluate the bound objective U = 2*u12 + u22 + u3 at one i*.

    u12 bounds the mixed lockdown/infection cost before herd immunity, u22
    is the exact quadratic infection cost after it, u3 the exact linear
    infection cost over the whole horizon.
    """
    i_max = uncontrolled_peak(init, p)
    if not 0.0 <= i_star <= i_max + 1e-12:
        raise RegimeError(f"i_star must lie in [0, i_max] = [0, {i_max:.6g}], got {i_star}")
    thr = p.herd_immunity_threshold

    eps = epsilon_constant()
    u12 = (
        eps
        * math.sqrt(c.kappa * c.gamma1)
        * (
            (-i_star + init.i - thr + init.s) / p.gamma
            + (math.log(thr) - math.log(init.s)) / p.beta
        )
    )

    herd = _herd_state(i_star, p)
    s_inf, r_inf = final_size(herd, p)
    rest = State(math.inf, s_inf, 0.0, r_inf)
    u22 = c.kappa * c.gamma1 * integral_infected_squared_uncontrolled(herd, rest, p)
    u3 = c.kappa * c.gamma0 * (r_inf - init.r) / p.gamma

    return 2.0 * u12 + u22 + u3, u12, u22, u3


def lower_bound(init: State, p: EpidemicParams, c: CostParams) -> BoundResult:
    """Minimize the bound objective over i* in [0, i_max]."""
    if p.beta * init.s <= p.gamma:
        raise RegimeError(
            f"bound needs beta*s0/gamma > 1, got {p.beta * init.s / p.gamma:.6g}"
        )
    i_max = uncontrolled_peak(init, p)

    def f(i_star):
        return bound_objective(i_star, init, p, c)[0]

    i_star, c_star = minimize_scalar(f, Bracket(0.0, i_max), tol=1e-8, n_scan=256)
    _, u12, u22, u3 = bound_objective(i_star, init, p, c)
    herd = _herd_state(i_star, p)
    s_inf, r_inf = final_size(herd, p)
    return BoundResult(c_star, i_star, u12, u22, u3, s_inf, r_inf)


def optimality_gaps(
    init: State, p: EpidemicParams, c: CostParams
) -> tuple[float, float]:
    """Worst-case suboptimality of the tuned feedback policies.

    Each gap is the policy's best closed-form cost minus the lower bound, an
    upper bound on its distance to the true optimum.
    """
    from .analytic import optimize_iota, optimize_rho

    bound = lower_bound(init, p, c)
    _, cert_a = optimize_rho(init, p, c)
    _, cert_b = optimize_iota(init, p, c)
    return cert_a.cost.total - bound.c_star, cert_b.cost.total - bound.c_star
