"""Exception hierarchy."""

from __future__ import annotations


class PeriodBoundError(Exception):
    """Base class for all errors raised by :mod:`periodbound`."""


class ParameterError(PeriodBoundError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class AlignmentError(PeriodBoundError, ValueError):
    """A state or field does not match the model dimension or grid."""


class PreconditionError(PeriodBoundError, ValueError):
    pass


class ResolutionError(PeriodBoundError, ValueError):
    """Too few samples for the requested quadrature or transform."""


class UndefinedOperatorError(PeriodBoundError):
    """The requested operator acts on an empty spectral block."""


class DivergenceError(PeriodBoundError, ArithmeticError):
    def __init__(self, step_index: int, message: str | None = None):
        self.step_index = step_index
        super().__init__(message or f"non-finite state at step {step_index}")


class InsufficientDataError(PeriodBoundError):
    pass


class NotPeriodicError(PeriodBoundError):
    pass


class IllConditionedSectionError(PeriodBoundError):
    pass


class ConvergenceError(PeriodBoundError):
    def __init__(self, message: str, residuals: list[float]):
        self.residuals = list(residuals)
        super().__init__(message)


class DegenerateOrbitError(PeriodBoundError):
    pass
