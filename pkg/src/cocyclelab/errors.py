"""Exception types shared across the library."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class RegimeError(RuntimeError):
    """Operation requires a numerical regime (e.g. positive Lyapunov exponent)
    that the supplied parameters do not provide."""


class BudgetExceeded(RuntimeError):
    """A subdivision / iteration budget ran out before convergence."""


class ContourInstability(RuntimeError):
    """Winding-number computation failed to stabilize on an integer."""


class QuadratureError(RuntimeError):
    """Two quadrature refinements disagree beyond tolerance."""


class PoleError(ZeroDivisionError):
    """Evaluation hit an exact pole (vanishing denominator determinant)."""


class ResolutionError(ValueError):
    """Requested increment is below the resolution of the underlying grid."""
