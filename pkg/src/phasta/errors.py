"""Exception types raised by the phasta library."""


class PhastaError(Exception):
    """Base class for all library errors."""


class ParameterDomainError(PhastaError):
    """A system parameter is outside its admissible domain."""


class NumericalDivergenceError(PhastaError):
    """The integrator produced NaN/Inf; carries the last valid state."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class UndefinedActivationError(PhastaError):
    """Activations requested for a state vector that is identically zero."""


class DegenerateActivationError(PhastaError):
    """Combined activation matrix sums to (near) zero and cannot be normalized."""


class InvalidTransitionMatrixError(PhastaError):
    """Transition matrix is not binary or has nonzero diagonal entries."""


class MissingGoalError(PhastaError):
    """An active blend slot has no motion goal or primitive attached."""


class BoundaryConsistencyError(PhastaError):
    """A transition primitive's endpoint knots do not match the state goals."""


class ConfigError(PhastaError):
    """Run configuration file violates the schema."""
