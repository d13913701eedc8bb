"""Exception types shared across the package."""

__all__ = [
    "SngError",
    "InvalidArgumentError",
    "InvalidFieldError",
    "InvalidBracketError",
    "WrongStateError",
    "ConvergenceError",
    "StepRejectedError",
]


class SngError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(SngError, ValueError):
    """An argument violates a documented precondition."""


class InvalidFieldError(SngError, ValueError):
    """A radial field is malformed (wrong length, non-finite, wrong dtype)."""


class InvalidBracketError(SngError):
    """A bisection bracket does not actually bracket a transition."""


class WrongStateError(SngError):
    """A converged trajectory has the wrong node count or lies outside the
    exponentially decaying regime; the caller must rebracket or enlarge the
    domain."""


class ConvergenceError(SngError):
    """An iterative procedure failed to converge within its iteration budget."""


class StepRejectedError(SngError):
    """A time step was rejected because the nonlinear potential changed too much
    between predictor and corrector.

    Attributes
    ----------
    suggested_dt : float
        A smaller step size expected to be accepted.
    """

    def __init__(self, message: str, suggested_dt: float):
        super().__init__(message)
        self.suggested_dt = suggested_dt
