"""Exception types shared across the package."""


class ThomaeError(Exception):
    """Base class for all package errors."""


class DegenerateCurve(ThomaeError):
    """Two branch points coincide within the degeneracy tolerance."""


class EvenCount(ThomaeError):
    """An even number of finite branch points was supplied."""


class AtBranchPoint(ThomaeError):
    """Differential evaluated at a branch point (y = 0)."""


class QuadratureNotConverged(ThomaeError):
    """Order doubling stalled above the accuracy target."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class LegendreCheckFailed(ThomaeError):
    """Period matrices violate the generalized Legendre relation."""

    def __init__(self, message, residual=None, matrices=None):
        super().__init__(message)
        self.residual = residual
        self.matrices = matrices


class TauNotSiegel(ThomaeError):
    """Im tau is not positive definite after the orientation fix."""


class PathThroughBranchPoint(ThomaeError):
    """An integration path node lies on a branch point."""


class RepeatedSupport(ThomaeError):
    """Divisor points share an x-coordinate."""


class MultiplicityOutOfRange(ThomaeError):
    """Requested multiplicity outside 0..floor((g+1)/2)."""


class WrongMultiplicity(ThomaeError):
    """Partition multiplicity does not match the requested formula."""


class BadKSize(ThomaeError):
    """Index set K has a cardinality the partition does not admit."""


class KNotInJ(ThomaeError):
    """Index set K is not contained in the finite part of J."""


class SmallDenominator(ThomaeError):
    """Reference derivative too small for a stable ratio."""


class SpecialDivisor(ThomaeError):
    """Theta denominator vanishes for the supplied divisor."""
