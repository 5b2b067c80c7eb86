#!/usr/bin/env python3
"""
Exception hierarchy for the program-cost toolkit.

Validation errors map to CLI exit code 1, numeric failures to exit code 2.
"""


class QProgError(Exception):
    """Base class for every error raised by the toolkit"""

    exit_code = 1

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__

    def __str__(self) -> str:
        return f"{self.__class__.__name__}: {self.message}"


class ValidationError(QProgError):
    """An input violated a documented precondition or invariant"""


class ParseError(ValidationError):
    """Malformed circuit or report JSON"""


class InvalidParams(ValidationError):
    pass


class InvalidEpsilon(ValidationError):
    pass


class PreconditionViolation(ValidationError):
    pass


class TooLarge(ValidationError):
    """Dense evaluation requested beyond the configured qubit guard"""


class DimensionMismatch(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class NotDensity(ValidationError):
    pass


class InvalidP(ValidationError):
    pass


class InvalidW(ValidationError):
    pass


class InvalidZeta(ValidationError):
    pass


class UnknownRow(ValidationError):
    pass


class MixedAxes(ValidationError):
    pass


class TooManyParts(ValidationError):
    pass


class UnsupportedRank(ValidationError):
    pass


class UnsupportedN(ValidationError):
    pass


class NoCertifiedNet(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class NumericFailure(QProgError):
    """A bound that must hold was observed to fail"""

    exit_code = 2
