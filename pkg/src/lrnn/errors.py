"""Exception types raised across the package."""


class LRNNError(Exception):
    """Base class for all solver errors."""


class InvalidShape(LRNNError, ValueError):
    pass


class DimensionMismatch(LRNNError, ValueError):
    pass


class PointOutsideDomain(LRNNError, ValueError):
    pass


class AmbiguousPoint(LRNNError, ValueError):
    pass


class NotOnInterface(LRNNError, ValueError):
    pass


class InvalidGeometry(LRNNError, ValueError):
    pass


class NoTimeAxis(LRNNError, ValueError):
    pass


class UnsupportedDepth(LRNNError, ValueError):
    pass


class UnsupportedDimension(LRNNError, ValueError):
    pass


class InfeasiblePlan(LRNNError, ValueError):
    pass


class EmptyRegion(LRNNError, ValueError):
    pass


class MissingInitialCondition(LRNNError, ValueError):
    pass


class NonFiniteInput(LRNNError, ValueError):
    pass


class ZeroDenominator(LRNNError, ZeroDivisionError):
    pass


class UnknownExample(LRNNError, KeyError):
    pass


class ConfigError(LRNNError, ValueError):
    pass
