"""Exception hierarchy shared across the package."""


class TopoidError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(TopoidError, ValueError):
    """An argument failed validation (shape, domain, or type)."""


class NumericalError(TopoidError):
    """A numerical routine failed to converge or produced unusable output."""


class InsufficientExcitationError(NumericalError):
    """The observed trajectory does not pin down a unique estimate.

    Raised when the regressor Gram matrix is singular to working precision,
    which happens for very short trajectories or degenerate noise.
    """
