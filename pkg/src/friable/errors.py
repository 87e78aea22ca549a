"""Exception types shared across the package."""


class FriableError(Exception):
    """Base class for package-specific failures."""


class InsufficientPrimesError(FriableError, ValueError):
    """Prime table too small to resolve every integer in the requested window."""


class IndexMismatchError(FriableError, ValueError):
    """A SmoothIndex does not cover the requested (x, y)."""


class MemoryBudgetError(FriableError, MemoryError):
    """Requested construction exceeds the configured memory budget."""


class ConvergenceError(FriableError, ArithmeticError):
    """An iterative solver or a quadrature failed to reach its tolerance."""


class RegionError(FriableError, ValueError):
    """Arguments fall outside the validity region of the requested evaluation."""


class TruncationError(FriableError, ArithmeticError):
    """Certified tail bound of a truncated Euler product exceeds the tolerance."""
