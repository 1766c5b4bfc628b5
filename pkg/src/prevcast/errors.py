"""Exception hierarchy shared by all prevcast modules.

Two broad families map onto the CLI exit codes: ``InputError`` (bad files,
bad arguments, violated preconditions; exit code 1) and ``NumericalError``
(a computation that started from valid inputs but could not finish; exit
code 2).
"""

from __future__ import annotations

import datetime as dt


class PrevcastError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PrevcastError):
    """Invalid input data, file, or argument. CLI exit code 1."""


class NumericalError(PrevcastError):
    """A numerical procedure failed on otherwise valid input. CLI exit code 2."""


class TooShortError(InputError):
    """A series is shorter than the operation requires."""


class LengthMismatchError(InputError):
    """Series that must be aligned differ in length or start date."""


class MissingDayError(InputError):
    """A day inside the requested range has no documents."""

    def __init__(self, date: dt.date, message: str | None = None):
        self.date = date
        super().__init__(message or f"no documents on {date.isoformat()}")


class NotAPeakError(InputError):
    """The given index is not a candidate peak."""


class InsufficientDataError(InputError):
    """Not enough observations to fit the requested model."""


class LexiconFormatError(InputError):
    """A lexicon or dimension-config file violates the documented format."""


class AllZeroActualsError(InputError):
    """MAPE is undefined: every actual value is zero."""


class NoActualPeaksError(InputError):
    """Hit rate is undefined: the actual peak set is empty."""


class NonFiniteError(NumericalError):
    """Training or evaluation produced NaN/inf values."""
