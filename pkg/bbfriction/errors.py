"""
Exception types raised by the blackbody friction toolkit.

Every error derives from FrictionError so callers can catch the whole family.
Parameter and config errors are also ValueErrors, which keeps plain
``except ValueError`` handlers working.
"""


class FrictionError(Exception):
    """Base class for all bbfriction errors."""


class InvalidParameterError(FrictionError, ValueError):
    """A physical or numerical parameter is outside its allowed range."""


class UnsupportedEvaluationError(FrictionError):
    """Pointwise evaluation was requested for a distribution-valued model."""


class IntegrandError(FrictionError):
    """An integrand returned non-finite values or an unexpected shape."""


class RhsEvaluationError(FrictionError):
    """The force evaluation behind the equation of motion failed."""


class ConfigError(FrictionError, ValueError):
    """A run configuration could not be read or failed validation."""


class SolverAbortError(FrictionError):
    """Time integration stopped early.

    Args:
        message: Human readable diagnostic
        trajectory: The samples accepted before the abort, if any
    """

    def __init__(self, message: str, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class StepSizeUnderflowError(SolverAbortError):
    """The adaptive step shrank below the resolution of the time axis."""


class StepLimitError(SolverAbortError):
    """The configured maximum number of steps was exhausted."""
