"""Exception hierarchy shared by all quenchlab modules."""


class QuenchLabError(Exception):
    """Base class for every error raised by quenchlab."""


class DomainError(QuenchLabError, ValueError):
    """Argument outside the domain where a formula is defined."""


class ConfigurationError(QuenchLabError, ValueError):
    """Invalid chain parameters or run configuration (odd N, bad grid, ...)."""


class InputError(QuenchLabError, ValueError):
    """Inconsistent inputs to a fit or collapse."""


class ResourceError(QuenchLabError):
    """Requested problem exceeds the dense exact-diagonalization cap."""


class NumericalError(QuenchLabError, ArithmeticError):
    """An iterative routine (quadrature, eigensolver) failed to converge."""


class DegeneracyError(QuenchLabError):
    """Ground state is not separated from the rest of the spectrum."""

    def __init__(self, message, gap):
        super().__init__(message)
        self.gap = gap


class BracketingError(QuenchLabError):
    """No interior maximum inside the requested search interval."""
