"""Exception types raised by revzeta."""


class RevZetaError(Exception):
    """Base class for all package errors."""


class ProfileError(RevZetaError, ValueError):
    """Invalid profile specification (unknown shape, bad parameters, f <= 0)."""


class DomainError(RevZetaError, ValueError):
    """Argument outside the domain of an operation."""


class QuadratureError(RevZetaError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes
    ----------
    estimate : float
        Best available value of the integral.
    error : float
        Error bound accompanying ``estimate``.
    """

    def __init__(self, message, estimate, error):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class IntegrationError(RevZetaError, ArithmeticError):
    """ODE integration failed (step underflow, step budget, sign flip)."""


class BracketError(RevZetaError, ArithmeticError):
    """Eigenvalue scan could not bracket the requested eigenvalue."""

    def __init__(self, message, n):
        super().__init__(f"{message} (n={n})")
        self.n = n


class CoverageError(RevZetaError, ValueError):
    """An eigenvalue table does not cover the range an operation needs."""


class ConsistencyError(RevZetaError, ArithmeticError):
    """Two routes to the same quantity disagree beyond tolerance."""


class FitError(RevZetaError, ValueError):
    """Least-squares fit is ill-posed on the supplied grid."""
