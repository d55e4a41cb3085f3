"""Exception hierarchy shared by all gammadev modules."""


class GammadevError(Exception):
    """Base class for every error raised by the package."""


class DomainError(GammadevError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConstraintError(GammadevError, ValueError):
    """A mass or volume constraint cannot be satisfied."""


class ConfigurationError(GammadevError, ValueError):
    """A norm, well or run configuration is malformed."""


class GeometryError(GammadevError, ValueError):
    """A ball or support inclusion needed by a construction fails."""


class DegenerateStateError(GammadevError, RuntimeError):
    """A computed state lacks a feature the caller relies on."""


class InsufficientDataError(GammadevError, ValueError):
    """Not enough completed rows to fit a rate."""


class NumericalError(GammadevError, RuntimeError):
    """A quadrature or iterative solve failed to reach its tolerance.

    ``estimate`` carries the last value that was computed, if any.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class UsageError(GammadevError, ValueError):
    """Bad command-line usage (unknown format, missing option)."""
