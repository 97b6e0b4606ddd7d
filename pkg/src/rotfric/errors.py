"""Exception hierarchy."""


class RotfricError(Exception):
    """Base class for library errors."""


class DomainError(RotfricError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class FrequencyRangeError(RotfricError, ValueError):
    """Frequency outside a tabulated model's range."""

    def __init__(self, omega, lo, hi):
        super().__init__(
            f"frequency {omega!r} outside tabulated range [{lo!r}, {hi!r}]")
        self.omega = omega
        self.valid = (lo, hi)


class PassivityError(RotfricError, ValueError):
    """A model or sample has negative dissipation."""


class ParseError(RotfricError, ValueError):
    def __init__(self, message, lineno=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.lineno = lineno
        self.path = path


class MonotonicityError(RotfricError, ValueError):
    pass


class PoleError(RotfricError, ZeroDivisionError):
    """Evaluation exactly at a pole (e.g. the Froehlich condition eps = -2)."""


class SingularPointError(RotfricError, ZeroDivisionError):
    """coth(hbar*omega / 2 kB T) requested at omega = 0 with T > 0."""


class BranchCutError(RotfricError, ArithmeticError):
    """Reflection coefficient violates passivity; wrong square-root branch."""


class QuadratureError(RotfricError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    ``partial`` holds the best estimate available and ``error`` its
    estimated absolute error.
    """

    def __init__(self, message, partial=None, error=None):
        super().__init__(message)
        self.partial = partial
        self.error = error


class ConfigError(RotfricError, ValueError):
    """Invalid scenario configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
