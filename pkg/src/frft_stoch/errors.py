"""Exception hierarchy.

``NumericalError`` subclasses map to CLI exit code 3, ``ValidationError``
subclasses to exit code 2.
"""


class FrftError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FrftError, ValueError):
    pass


class NumericalError(FrftError, ArithmeticError):
    pass


class SingularAngle(NumericalError):
    """The kernel degenerates to a delta function (sin(alpha) ~ 0)."""


class GridTooCoarse(NumericalError):
    """The sampling step cannot resolve the kernel chirp."""


class DegreeOutOfRange(ValidationError):
    pass


class SizeError(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class NotPSD(ValidationError):
    pass


class SeedRequired(ValidationError):
    pass


class TooFewRealizations(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class OutOfInterval(ValidationError):
    pass
