"""Exception and warning types shared across the package."""


class EigenLabError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(EigenLabError):
    """Input matrix or request violates a documented invariant."""


class DimensionMismatch(EigenLabError):
    """Operation received a matrix of unsupported dimension."""


class SingularMatrix(EigenLabError):
    """Cholesky pivot fell below the positivity threshold."""


class NoConvergence(EigenLabError):
    """Iterative routine exhausted its sweep budget."""


class MaxItersExceeded(EigenLabError):
    """Run hit the iteration cap before every row converged.

    Carries the partial trace and the last state so callers can inspect
    how far the iteration got.
    """

    def __init__(self, message, trace=None, state=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []
        self.state = state


class UnknownSession(EigenLabError):
    """Session id does not name a live session."""


class IndexOutOfRange(EigenLabError):
    """History index outside the recorded range."""


class ShiftNotPancaking(UserWarning):
    """Shift exceeds the smallest-eigenvalue estimate.

    The shifted matrix then has a negative eigenvalue, so the ellipsoid
    reading of the intermediate breaks down; the computation itself is
    still well defined and proceeds.
    """
