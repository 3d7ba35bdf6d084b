"""Immutable parameter and state types for the controlled SIR model.

Conventions used throughout the package: time is measured in days, rates in
1/day, and (s, i, r) are population fractions on the unit simplex. Lockdown
at level L in [0, l_max] scales transmission by (1 - theta*L)^2.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

SIMPLEX_TOL = 1e-9  # allowed |s+i+r-1| on states and trajectory samples


@dataclass(frozen=True)
class EpidemicParams:
    """Transmission/recovery rates and the lockdown lever.

    beta    infection rate (1/day)
    gamma   recovery rate (1/day)
    theta   lockdown effectiveness, in (0, 1]
    l_max   maximum lockdown level, in (0, 1]
    """

    beta: float
    gamma: float
    theta: float = 1.0
    l_max: float = 1.0

    def __post_init__(self):
        if not self.beta > 0.0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must be in (0, 1], got {self.theta}")
        if not 0.0 < self.l_max <= 1.0:
            raise ValueError(f"l_max must be in (0, 1], got {self.l_max}")

    @property
    def herd_immunity_threshold(self) -> float:
        """Susceptible fraction gamma/beta below which infections decline."""
        return self.gamma / self.beta

    def effective_transmission(self, L: float) -> float:
        """beta*(1 - theta*L)^2, the transmission rate under lockdown L."""
        u = 1.0 - self.theta * L
        return self.beta * u * u


@dataclass(frozen=True)
class CostParams:
    """Cost weights: c(t) = L + kappa*(gamma0 + gamma1*i)*i.

    kappa   economic-epidemic trade-off (dimensionless)
    gamma0  baseline mortality coefficient (1/day)
    gamma1  congestion mortality coefficient (1/day)
    """

    kappa: float
    gamma0: float
    gamma1: float

    def __post_init__(self):
        for name in ("kappa", "gamma0", "gamma1"):
            v = getattr(self, name)
            if not v >= 0.0:
                raise ValueError(f"{name} must be >= 0, got {v}")


@dataclass(frozen=True)
class State:
    """A point (s, i, r) on the unit simplex at time t (days)."""

    t: float
    s: float
    i: float
    r: float

    def __post_init__(self):
        if not self.t >= 0.0:
            raise ValueError(f"t must be >= 0, got {self.t}")
        for name in ("s", "i", "r"):
            v = getattr(self, name)
            if not -SIMPLEX_TOL <= v <= 1.0 + SIMPLEX_TOL:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        gap = abs(self.s + self.i + self.r - 1.0)
        if gap > SIMPLEX_TOL:
            raise ValueError(f"s+i+r deviates from 1 by {gap:.3g}")


@dataclass(frozen=True)
class CostBreakdown:
    """Integrated cost components of one trajectory.

    economic            integral of L dt (days)
    infected_linear     kappa*gamma0 * integral of i dt
    infected_quadratic  kappa*gamma1 * integral of i^2 dt
    deaths              integral of (gamma0 + gamma1*i)*i dt (population fraction)
    total               economic + infected_linear + infected_quadratic
    """

    economic: float
    infected_linear: float
    infected_quadratic: float
    deaths: float

    @property
    def total(self) -> float:
        return self.economic + self.infected_linear + self.infected_quadratic

    def __add__(self, other: "CostBreakdown") -> "CostBreakdown":
        return CostBreakdown(
            economic=self.economic + other.economic,
            infected_linear=self.infected_linear + other.infected_linear,
            infected_quadratic=self.infected_quadratic + other.infected_quadratic,
            deaths=self.deaths + other.deaths,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["total"] = self.total
        return d

    @staticmethod
    def zero() -> "CostBreakdown":
        return CostBreakdown(0.0, 0.0, 0.0, 0.0)


def state_on_simplex(t: float, s: float, i: float) -> State:
    """Build a State from (s, i), deriving r = 1 - s - i.

    Clamps roundoff-negative fractions to 0 so that integrator output always
    validates.
    """
    s = min(max(s, 0.0), 1.0)
    i = min(max(i, 0.0), 1.0)
    return State(t=t, s=s, i=i, r=max(1.0 - s - i, 0.0))


def baseline_params() -> tuple[EpidemicParams, CostParams, State]:
    """Default parameter set used across the experiments.

    beta=0.2, gamma=1/18, gamma0=5.6e-4, gamma1=5.6e-3, kappa=40*365,
    (s0, i0, r0) = (0.98, 0.01, 0.01).
    """
    p = EpidemicParams(beta=0.2, gamma=1.0 / 18.0)
    c = CostParams(kappa=40.0 * 365.0, gamma0=5.6e-4, gamma1=5.6e-3)
    init = State(t=0.0, s=0.98, i=0.01, r=0.01)
    return p, c, init
