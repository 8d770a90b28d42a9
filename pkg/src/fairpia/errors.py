"""Exception types shared across the package."""


class FairPiaError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FairPiaError):
    """Parameter value outside the spline's parametric domain."""


class UnsupportedOrderError(FairPiaError):
    """Requested derivative / functional order not available for this degree."""


class InvalidWeightError(FairPiaError):
    """Fairing weight outside the admissible open interval, or wrong shape."""


class ExcludedPointError(FairPiaError):
    """Control point whose functional diagonal is (numerically) zero."""


class DimensionMismatchError(FairPiaError):
    """Operand shapes do not agree."""


class UndefinedMetricError(FairPiaError):
    """Metric has no value for this input (e.g. zero initial energy)."""


class FixedPointSignal(FairPiaError):
    """Zero iteration-deviation denominator: the run is at a fixed point.

    Raised by :func:`fairpia.metrics.relative_iter_deviation` and consumed by
    the fairing loop's stop logic; it is a control signal, not a failure.
    """


class ModelFormatError(FairPiaError):
    """Model file fails structural or semantic validation."""


class NumericalError(FairPiaError):
    """A numerical routine failed unexpectedly (e.g. factorization)."""
