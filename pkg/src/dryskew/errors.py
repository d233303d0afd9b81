"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the documented domain of a function."""


class ConfigurationError(ValueError):
    """Parameters are inconsistent (mixed drift modes, bad lattice, bad grid)."""


class ConvergenceError(RuntimeError):
    """Adaptive integration ran out of budget.

    The best available estimate is kept on the exception so callers can
    decide whether it is good enough.
    """

    def __init__(self, message, value=float("nan"), error=float("inf")):
        super().__init__(message)
        self.value = value
        self.error = error


class DivergenceError(ConvergenceError):
    """A semi-infinite integrand never decayed below the tail bound."""
