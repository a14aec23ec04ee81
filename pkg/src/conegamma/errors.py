"""Exception types shared across the package."""


class ConeGammaError(ValueError):
    """Base class for all package errors."""


class DomainError(ConeGammaError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(ConeGammaError):
    """A parameter object failed validation."""


class UnsupportedError(ConeGammaError):
    """The requested conversion or operation is not available for this input."""


class MomentError(ConeGammaError):
    """A requested moment is infinite."""
