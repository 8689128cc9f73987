"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the closed unit disk or another admissible range."""


class ValidationError(ValueError):
    """A file, record or certificate failed validation."""


class ConditioningError(ArithmeticError):
    """The kernel Gram matrix is numerically singular.

    ``pair`` holds the two offending points.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class CertificateError(ValidationError):
    """A bound's certificate does not re-validate."""


class SandwichViolation(AssertionError):
    """A study row has ``g_value > d2_value + tol``; ``forensics`` carries both certificates."""

    def __init__(self, message, forensics=None):
        super().__init__(message)
        self.forensics = forensics or {}
