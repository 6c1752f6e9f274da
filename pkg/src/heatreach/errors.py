"""Exception hierarchy shared by every module of the package."""


class HeatReachError(Exception):
    """Base class for all package errors."""


class NonConvergent(HeatReachError):
    """A quadrature ran out of refinement levels before meeting its tolerance."""

    def __init__(self, message, value=None, err_estimate=None):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


class QuadratureFailure(NonConvergent):
    """The heat-kernel convolution of a sampled initial state did not converge."""


class DegreeTooLarge(HeatReachError, ValueError):
    """A polynomial degree or truncation index exceeds the double-precision cap."""


class SupportExceedsHorizon(HeatReachError, ValueError):
    """A step control would extend past the time horizon."""


class InvalidControl(HeatReachError, ValueError):
    """Breakpoints or levels violate the step-control schema."""


class NoConvergence(HeatReachError):
    """The switching-point solver stopped without reaching its tolerance.

    The best iterate found is kept on the exception so callers can still
    inspect (or write out) a partial result.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InfeasibleOrdering(NoConvergence):
    """Newton left the ordered simplex and the projection could not repair it."""
