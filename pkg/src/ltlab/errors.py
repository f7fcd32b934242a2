"""Exception types shared across the package."""


class LTLabError(Exception):
    """Base class for all package errors."""


class DomainError(LTLabError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class DivergenceError(LTLabError, ArithmeticError):
    """An integral or constant is infinite for the given parameters."""


class QuadratureError(LTLabError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class NoBracketError(LTLabError, ValueError):
    """Root finding could not bracket a solution."""


class AllDivergentError(LTLabError):
    """Every trial evaluated by the optimizer was divergent."""


class RankDeficiencyError(LTLabError, ValueError):
    """A family of fields could not be orthonormalized."""


class DepthExhaustedError(LTLabError):
    """A reference cell carries mass >= Lambda, so subdivision cannot stop."""


class InvariantViolation(LTLabError, AssertionError):
    """An internal postcondition failed (indicates a bug, not bad input)."""
