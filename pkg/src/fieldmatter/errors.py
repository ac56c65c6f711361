"""Exception hierarchy shared by all modules."""


class FieldMatterError(Exception):
    """Base class for errors raised by this package."""


class InvalidStateError(FieldMatterError, ValueError):
    """A covariance matrix failed a structural check (shape, symmetry, positivity)."""


class UnphysicalStateError(InvalidStateError):
    """A symplectic eigenvalue fell below one, violating the uncertainty relation."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class DomainError(FieldMatterError, ValueError):
    """Inputs outside the domain where an operation is defined."""


class NumericalError(FieldMatterError, ArithmeticError):
    """Quadrature or eigensolver failure.

    ``partial`` carries the best available value, ``residual`` the size of the
    violated check, when known.
    """

    def __init__(self, message, partial=None, residual=None):
        super().__init__(message)
        self.partial = partial
        self.residual = residual


class ContourError(NumericalError):
    """The contour integrand became singular or failed to decay."""


class ConfigError(FieldMatterError, ValueError):
    """Invalid run configuration (CLI flags or config file)."""
