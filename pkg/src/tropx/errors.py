"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`TropxError`
so the CLI can map it to the "malformed input" exit code.
"""


class TropxError(Exception):
    """Base class for all library errors."""


class ComplexError(TropxError):
    """Structural problem with a Delta-complex description."""


class DuplicateId(ComplexError):
    pass


class MissingFace(ComplexError):
    pass


class NonRegular(ComplexError):
    pass


class InconsistentFaces(ComplexError):
    """Face maps of a simplex do not commute."""


class Disconnected(ComplexError):
    pass


class DimensionExceeded(ComplexError):
    pass


class WrongDimension(TropxError):
    pass


class NotSymmetric(TropxError):
    pass


class RidgeIdentityViolated(TropxError):
    """Structure constants of some ridge do not sum to its degree."""

    def __init__(self, message, ridges=()):
        super().__init__(message)
        self.ridges = list(ridges)


class DimensionMismatch(TropxError):
    pass


class NonIntegralSlopes(TropxError):
    pass


class NonIntegralDivisor(TropxError):
    pass


class UnknownRidgeId(TropxError):
    pass


class PointOutsideComplex(TropxError):
    pass


class UnsupportedDimension(TropxError):
    pass


class SinglePointComplex(TropxError):
    pass


class FormatError(TropxError):
    """Malformed JSON input."""
