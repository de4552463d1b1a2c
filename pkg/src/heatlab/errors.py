"""Exception types shared across the package."""


class HeatLabError(Exception):
    """Base class for all package errors."""


class ParameterError(HeatLabError):
    """A spec or builder received parameters outside its validity range."""


class DivergentTailError(HeatLabError):
    """An improper integral has a non-integrable tail (reported distinctly
    from quadrature failure)."""


class QuadratureError(HeatLabError):
    """Adaptive quadrature could not reach the requested tolerance."""


class RangeError(HeatLabError):
    """Evaluation outside the attainable/tabulated range."""


class UnsupportedOperationError(HeatLabError):
    """Operation is deliberately refused for this spec (e.g. tail
    extrapolation of a tabulated nonlinearity)."""


class NonMonotoneIterationError(HeatLabError):
    """The monotone iteration ladder lost pointwise monotonicity, which
    signals a numerical consistency failure."""
