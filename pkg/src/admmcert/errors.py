"""Exception hierarchy shared by all modules."""


class AdmmError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(AdmmError, ValueError):
    """Shapes do not conform, or a matrix is empty where data is required."""


class SymmetryError(AdmmError, ValueError):
    pass


class ParameterError(AdmmError, ValueError):
    pass


class SingularSystemError(AdmmError):
    """Linear system is singular or numerically rank deficient."""


class InfeasibleError(AdmmError):
    """A polyhedral set (or a QP over it) has no feasible point."""


class UnboundedError(AdmmError):
    """A convex QP is feasible but its objective is unbounded below."""


class BudgetError(AdmmError):
    """An iterative routine exhausted its step budget."""


class CapacityError(AdmmError):
    """Input exceeds the enumeration caps of the brute-force oracle."""
