"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for toolkit-specific errors."""


class TailTooLarge(ToolkitError):
    """Truncation dimension too small for the requested phase-space point."""


class NotPSD(ToolkitError):
    """Matrix has an eigenvalue below the positive-semidefinite tolerance."""


class DimensionMismatch(ToolkitError):
    """Operands live in truncated bases of different size."""


class BoundaryMaximum(ToolkitError):
    """Grid maximum sits on the outermost ring; enlarge the search radius."""


class ValueTooSmall(ToolkitError):
    """Husimi value too small for a stable logarithmic derivative."""


class RadiusTooSmall(ToolkitError):
    """A super-level segment reaches the radial cutoff."""


class NoCrossing(ToolkitError):
    """mu - mu0 has no sign change (coherent-state input)."""


class QuadratureDisagreement(ToolkitError):
    """Independent integration routes differ beyond the hard limit."""


class NonIntegrable(ToolkitError):
    """phi(u)/u is not integrable near zero."""


class EmptyLevelSet(ToolkitError):
    """Threshold at or above the global maximum of the density."""


class ConfigurationError(ToolkitError):
    """Invalid run configuration (e.g. a linear symbol in a stability check)."""


class ConsistencyError(ToolkitError):
    """Internal cross-check between independent formulas failed."""


class AssertionFailure(ToolkitError):
    """A verification sweep found inequality violations."""

    def __init__(self, message, run=None):
        super().__init__(message)
        self.run = run
