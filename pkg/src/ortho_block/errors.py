"""Exception types raised across the package."""


class OrthoBlockError(Exception):
    """Base class for all package errors."""


class ZeroDivisor(OrthoBlockError, ZeroDivisionError):
    pass


class DegreeTooLarge(OrthoBlockError, ValueError):
    pass


class DimensionMismatch(OrthoBlockError, ValueError):
    pass


class MultiplicityTooLow(OrthoBlockError, ValueError):
    pass


class CoefficientMissing(OrthoBlockError, IndexError):
    pass


class NotDivisible(OrthoBlockError, ValueError):
    pass


class SingularD(OrthoBlockError, ArithmeticError):
    pass


class SingularA(OrthoBlockError, ArithmeticError):
    pass


class DegreeMismatch(OrthoBlockError, ValueError):
    pass


class DegreeViolation(OrthoBlockError, ValueError):
    pass


class NotTriangular(OrthoBlockError, ValueError):
    pass


class DegreeExceedsQuadrature(OrthoBlockError, ValueError):
    pass


class RankDeficient(OrthoBlockError, ValueError):
    pass


class IndexOutOfRange(OrthoBlockError, IndexError):
    pass


class GramNotPD(OrthoBlockError, ArithmeticError):
    pass


class BandViolation(OrthoBlockError, ValueError):
    pass


class RootFindingFailure(OrthoBlockError, ArithmeticError):
    pass


class SchemaError(OrthoBlockError, ValueError):
    """Input document does not match the expected JSON layout."""


class VerificationFailure(OrthoBlockError):
    """A residual exceeded its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
