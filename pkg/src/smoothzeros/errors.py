"""Exception hierarchy shared by every module.

CLI exit codes are attached to the classes so the command layer can map a
failure to its status without a lookup table.
"""

from __future__ import annotations


class SmoothZerosError(Exception):
    exit_code = 1


class InputError(SmoothZerosError, ValueError):
    """Malformed document, bad parameter or unsupported request shape."""

    exit_code = 2


class ZeroSetFormatError(InputError):
    pass


class Undecidable(SmoothZerosError):
    """A membership or gap query needs more resolution than the zero-set description carries."""

    exit_code = 2


class UnsupportedZeroSet(InputError):
    pass


class PreconditionViolation(SmoothZerosError):
    """A mathematical hypothesis of a construction fails.

    ``reason`` names the result whose hypothesis is violated.
    """

    exit_code = 3

    def __init__(self, message: str, reason: str = ""):
        super().__init__(message)
        self.reason = reason


class NotRepresentableAsEntire(PreconditionViolation):
    pass


class InteriorNotEmpty(PreconditionViolation):
    pass


class AccumulationPointPresent(PreconditionViolation):
    pass


class PoleAtExpansionPoint(SmoothZerosError, ArithmeticError):
    exit_code = 3


class ExponentOverflow(SmoothZerosError, ArithmeticError):
    exit_code = 3


class TailBoundUnachievable(SmoothZerosError):
    """The series cost model refuses the requested order or accuracy."""

    exit_code = 4
