"""Exception types shared across the package."""


class SirlockError(Exception):
    """Base class for errors raised by this package."""


class BracketError(SirlockError):
    """A scalar solver was handed a bracket without a sign change."""


class IntegrationError(SirlockError):
    """The adaptive integrator failed (step-size underflow).

    Carries the time at which the step collapsed.
    """

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (at t={t:.6g})")
        self.t = t


class RegimeError(SirlockError):
    """An analytic formula was requested outside its validity regime."""
