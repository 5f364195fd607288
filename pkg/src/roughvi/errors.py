"""Exception hierarchy shared by all modules."""


class RoughVIError(Exception):
    """Base class for all package errors."""


class ValidationError(RoughVIError, ValueError):
    """Input data violates a modelling assumption or parameter range."""


class GeometryError(RoughVIError, ValueError):
    """The requested geometry cannot be meshed."""


class AssemblyError(RoughVIError):
    """Raised on degenerate elements or inconsistent operators."""


class SolverError(RoughVIError):
    """A solver failed; ``residual`` carries the last residual if known."""

    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = history


class NonConvergenceError(SolverError):
    pass


class ConditioningError(SolverError):
    pass


class PointLookupError(RoughVIError, LookupError):
    """A point could not be located in any triangle of a mesh."""


class RegimeError(RoughVIError, ValueError):
    """Parameters fall outside the branch an operation supports."""
