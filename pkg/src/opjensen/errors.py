"""Exception hierarchy shared by all modules."""


class OpJensenError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(OpJensenError, ValueError):
    pass


class DomainError(OpJensenError, ValueError):
    """An eigenvalue or scalar argument fell outside a function's interval."""


class PositivityError(DomainError):
    """A matrix required to be strictly positive is not."""


class NumericalError(OpJensenError, ArithmeticError):
    """Non-convergence, overflow or a failed internal consistency check."""


class ValidationError(OpJensenError, ValueError):
    """Malformed or inconsistent input data (instances, families, files)."""
