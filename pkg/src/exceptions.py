"""
Domain errors. Each carries the offending ids in its message.
"""


class GeometryError(ValueError):
    """Base class for degenerate geometric configurations."""


class OverlappingBoundaries(GeometryError):
    """Two boundaries share a one-dimensional piece."""


class DegenerateConfiguration(GeometryError):
    """Input violates the general-position assumption of an operation."""


class MissingPoints(ValueError):
    """Discrete mode requested on an instance without a point set."""


class WeightedInstanceError(ValueError):
    """An unweighted-only operation received distinct weights."""


class NotIndependent(ValueError):
    """A supposedly independent id set contains a conflicting pair."""


class NoUnionBound(ValueError):
    """tau auto-selection requested for a family without a union-complexity bound."""


class CycleDetected(RuntimeError):
    """The crossing order contains a cycle (geometry misclassification)."""


class TooLarge(ValueError):
    """Input exceeds the size an exact oracle accepts."""


class IncompatibleAlgorithm(ValueError):
    """Algorithm cannot run on the given instance."""


class InvalidParameters(ValueError):
    """Out-of-range generator or solver parameters."""
