"""Exception types. Each maps to a CLI exit code."""


class EigenlinkError(Exception):
    exit_code = 1


class UsageError(EigenlinkError):
    exit_code = 1


class DataError(EigenlinkError):
    """Unreadable, malformed or inconsistent input data."""

    exit_code = 2


class NumericalError(EigenlinkError):
    exit_code = 3


class ConvergenceError(NumericalError):
    """Lanczos iteration ran out of budget before meeting the tolerance."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


class DegenerateError(NumericalError):
    """A quantity is undefined for this input (zero variance, zero spectrum)."""


class DivergenceError(NumericalError):
    """Katz series does not converge for the given damping factor."""


class ResourceError(EigenlinkError):
    """Dense evaluation requested above the configured size cap."""

    exit_code = 2
