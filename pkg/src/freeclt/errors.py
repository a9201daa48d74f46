"""Exception hierarchy shared by all freeclt modules."""


class FreeCLTError(Exception):
    """Base class for library errors."""


class DomainError(FreeCLTError, ValueError):
    """Argument outside the domain of the operation."""


class PrecisionError(FreeCLTError, ArithmeticError):
    """Working precision is insufficient to certify a result."""


class ConvergenceError(FreeCLTError, ArithmeticError):
    """An iterative solver failed to converge or to bracket a root."""


class NumericalError(FreeCLTError, ArithmeticError):
    """Floating-point breakdown in a simulation (e.g. loss of positivity)."""

    def __init__(self, message, *, trial=None, step=None):
        super().__init__(message)
        self.trial = trial
        self.step = step


class OverflowGuardError(FreeCLTError, OverflowError):
    """Requested moment order would overflow double precision."""

    def __init__(self, k):
        super().__init__(f"moment order k={k} overflows the float64 aggregation range")
        self.k = k
