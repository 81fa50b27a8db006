"""Exception types shared by all modules.

Each maps to a CLI exit code: certificate failures exit 2, precision
problems exit 3, bad input exits 4.
"""

from __future__ import annotations


class CycliftError(Exception):
    exit_code = 1


class BadInput(CycliftError, ValueError):
    exit_code = 4


class PrecisionError(CycliftError, ArithmeticError):
    """An exact comparison could not be decided at the tracked precision."""

    exit_code = 3

    def __init__(self, message: str, where: object = None):
        super().__init__(message)
        self.where = where


class NeedsExtension(CycliftError, ArithmeticError):
    """A root only exists after enlarging the field; ``factor`` is the
    suggested ramification growth."""

    exit_code = 3

    def __init__(self, message: str, factor: int = 1):
        super().__init__(message)
        self.factor = factor


class CertificateError(CycliftError, AssertionError):
    exit_code = 2
