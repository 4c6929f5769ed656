"""Exception hierarchy."""


class EntlawError(Exception):
    """Base class for all errors raised by entlaw."""


class DimensionError(EntlawError, ValueError):
    """Shapes or bipartite dimensions are missing or incompatible."""


class ResourceLimitError(EntlawError):
    """A requested operator would exceed the configured maximum dimension."""


class NotHermitianError(EntlawError, ValueError):
    """Input deviates from Hermiticity by more than the construction tolerance."""


class InvalidStateError(EntlawError, ValueError):
    """Input is not positive semidefinite or not (sub)normalized as required."""


class DomainError(EntlawError, ValueError):
    """A parameter lies outside the domain where the quantity is defined."""


class NumericalFailure(EntlawError, ArithmeticError):
    """An iterative method did not converge; ``residual`` carries the last residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
