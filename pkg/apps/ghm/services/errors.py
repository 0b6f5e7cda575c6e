# apps/ghm/services/errors.py
import click


class GHMError(Exception):
    """Base class for every error raised by the ghm library."""


# -------------------------------
#   Parameters / inputs
# -------------------------------
class ParameterError(GHMError, ValueError):
    pass


class IndexOutOfRange(ParameterError):
    pass


class ZeroScaleFactor(ParameterError):
    pass


class InvalidModulus(ParameterError):
    pass


class PrecisionError(ParameterError):
    pass


class MalformedRational(ParameterError):
    pass


# -------------------------------
#   Linear algebra
# -------------------------------
class LinearAlgebraError(GHMError, ArithmeticError):
    pass


class SingularMatrix(LinearAlgebraError):
    pass


class NotHermitian(LinearAlgebraError):
    pass


class NotPositiveDefinite(LinearAlgebraError):
    pass


class NotTriangular(LinearAlgebraError):
    pass


# -------------------------------
#   Orthogonal system generators
# -------------------------------
class GeneratorError(GHMError):
    pass


class ZeroDiagonal(GeneratorError):
    pass


class GeneratorUnavailable(GeneratorError):
    pass


class NotApplicable(GHMError):
    pass


class ZeroDenominator(GHMError, ZeroDivisionError):
    pass


class NonConvergent(GHMError, ValueError):
    pass


class ExactnessViolation(GHMError, AssertionError):
    """An identity that must hold in exact arithmetic did not."""


# -------------------------------
#   CLI usage (exit code 2 through click)
# -------------------------------
class UsageError(GHMError, click.UsageError):
    pass


class UnknownFlag(UsageError):
    pass


class MissingParameter(UsageError):
    pass


class IncompatibleCommand(UsageError):
    pass


class MalformedFlagValue(UsageError, MalformedRational):
    """A flag value that is not a valid rational, raised while parsing argv."""


# -------------------------------
#   Warnings
# -------------------------------
class SignAlignmentWarning(UserWarning):
    pass


class UncertifiedBoundWarning(UserWarning):
    pass
