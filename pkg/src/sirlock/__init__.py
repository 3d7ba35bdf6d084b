"""Optimal and feedback lockdown control of a SIR epidemic.

Simulation of lockdown-controlled SIR dynamics, two feedback policies with
closed-form infinite-horizon costs, a certified lower bound on the optimal
cost, and a direct numerical optimal-control solver.
"""

from .analytic import (
    PolicyACertificate,
    PolicyBCertificate,
    cost_policy_a,
    cost_policy_b,
    optimize_iota,
    optimize_rho,
    uncontrolled_tail_cost,
)
from .bound import (
    BoundResult,
    bound_objective,
    epsilon_constant,
    lower_bound,
    optimality_gaps,
)
from .controls import ConstantControl, PiecewiseConstantControl
from .errors import BracketError, IntegrationError, RegimeError, SirlockError
from .integrator import (
    Segment,
    ThresholdEvent,
    Trajectory,
    integrate,
    integrate_to_rest,
    trajectory_cost,
    trajectory_to_csv,
)
from .model import (
    conserved_quantity,
    derivative,
    final_size,
    integral_infected_squared_uncontrolled,
    orbit_state_at_s,
    reproduction_numbers,
    uncontrolled_peak,
)
from .numerics import Bracket, minimize_scalar, solve_scalar_root
from .ocontrol import (
    OCResult,
    classify_regime,
    cost_gradient,
    infinite_horizon_cost,
    lockdown_foi_correlation,
    solve_optimal_control,
)
from .params import (
    CostBreakdown,
    CostParams,
    EpidemicParams,
    State,
    baseline_params,
    state_on_simplex,
)
from .policies import (
    ForceOfInfectionControl,
    HoldPrevalenceControl,
    PolicyRun,
    ReproductionTargetControl,
    force_of_infection_lockdown,
    policy_a_lockdown,
    policy_b_lockdown,
    simulate_policy_a,
    simulate_policy_b,
)

__version__ = "0.1.0"

__all__ = [
    "Bracket",
    "BracketError",
    "BoundResult",
    "ConstantControl",
    "CostBreakdown",
    "CostParams",
    "EpidemicParams",
    "ForceOfInfectionControl",
    "HoldPrevalenceControl",
    "IntegrationError",
    "OCResult",
    "PiecewiseConstantControl",
    "PolicyACertificate",
    "PolicyBCertificate",
    "PolicyRun",
    "RegimeError",
    "ReproductionTargetControl",
    "Segment",
    "SirlockError",
    "State",
    "ThresholdEvent",
    "Trajectory",
    "baseline_params",
    "bound_objective",
    "classify_regime",
    "conserved_quantity",
    "cost_gradient",
    "cost_policy_a",
    "cost_policy_b",
    "derivative",
    "epsilon_constant",
    "final_size",
    "force_of_infection_lockdown",
    "infinite_horizon_cost",
    "integral_infected_squared_uncontrolled",
    "integrate",
    "integrate_to_rest",
    "lockdown_foi_correlation",
    "lower_bound",
    "minimize_scalar",
    "optimality_gaps",
    "optimize_iota",
    "optimize_rho",
    "orbit_state_at_s",
    "policy_a_lockdown",
    "policy_b_lockdown",
    "reproduction_numbers",
    "simulate_policy_a",
    "simulate_policy_b",
    "solve_optimal_control",
    "solve_scalar_root",
    "state_on_simplex",
    "trajectory_cost",
    "trajectory_to_csv",
    "uncontrolled_peak",
    "uncontrolled_tail_cost",
]
