"""Shared exception types."""


class SingularModelError(RuntimeError):
    """The observation Gram matrix is numerically singular.

    Carries the offending determinant so callers can report how close to
    degeneracy the model is.
    """

    def __init__(self, message: str, det: float | None = None):
        super().__init__(message)
        self.det = det


class OracleConvergenceError(RuntimeError):
    """The dual bisection of the linear oracle failed to bracket or converge."""


class DegenerateGradientError(ValueError):
    """The linear oracle was called with a zero objective matrix."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or out of range."""
