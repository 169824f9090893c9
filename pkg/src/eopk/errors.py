"""Exception hierarchy.

Every numerical failure mode has its own class so callers (and the CLI exit
code mapping) can tell validation problems from numerical breakdown.
"""


class EOPError(Exception):
    """Base class for all library errors."""


class ValidationError(EOPError, ValueError):
    """Bad user input: parameters out of range, malformed weight spec, ..."""


class NumericalError(EOPError, ArithmeticError):
    """The computation ran but could not reach the requested accuracy."""


# weierstrass
class NonPositiveTau(ValidationError):
    pass


class TruncationTooCoarse(NumericalError):
    pass


class PoleProximity(NumericalError):
    pass


# quadrature
class OffContour(ValidationError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class WeightSyntaxError(ValidationError):
    pass


# eop core
class InvalidDegree(ValidationError):
    pass


class DegenerateNorm(NumericalError):
    pass


# recurrence
class InsufficientDegree(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class InconsistentCoefficients(NumericalError):
    pass


# cd kernel
class NearConfluent(NumericalError):
    pass


class DegeneratePoint(NumericalError):
    pass


class NotDegenerate(ValidationError):
    pass


class DuplicatePoints(ValidationError):
    pass


# rhp
class TooCloseToContour(NumericalError):
    pass


# symmetric
class NotSymmetric(ValidationError):
    pass


class InversionFailure(NumericalError):
    pass


class DimensionTooLarge(ValidationError):
    pass


class RequiresUnityWeight(ValidationError):
    pass


# zeros
class CountMismatch(NumericalError):
    pass


class NotFound(NumericalError):
    pass


class IncompleteZeroSet(ValidationError):
    pass
