"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    pass


class DegenerateCurveError(ValueError):
    """Curve has zero length or too few distinct points for the operation."""


class DegenerateHullError(ValueError):
    """Hull is flat (planar or collinear) where a solid hull is required."""


class DomainError(ValueError):
    """Input lies outside the region where a formula is defined."""


class NonTerminationError(RuntimeError):
    pass


class InternalInconsistencyError(RuntimeError):
    """A proven inequality failed on a valid curve, which means a computation bug."""
