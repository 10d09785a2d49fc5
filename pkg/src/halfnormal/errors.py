"""Exception hierarchy shared by the whole package."""


class HalfNormalError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HalfNormalError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateSampleError(HalfNormalError):
    """A sample is degenerate for the requested statistic (e.g. S = 0)."""


class TieError(DegenerateSampleError):
    """The two reference observations coincide, so the maximal invariant
    is undefined.  Probability zero under the continuous model."""


class ConvergenceError(HalfNormalError):
    """An iterative numerical scheme failed to converge."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature failed to reach the requested tolerance within
    the allowed number of subdivisions."""


class InsufficientAcceptanceError(HalfNormalError):
    """A Monte Carlo acceptance loop exhausted its draw budget without
    accepting a single point."""


class EmptyWindowError(HalfNormalError):
    """A kernel-regression window contains no observations."""
