"""
Exception hierarchy shared by every module.

Errors describing bad arguments also derive from ValueError so callers that
only know the builtin contract keep working.
"""


class PointSpectraError(Exception):
    """Root of all library errors."""


class MixedFieldError(PointSpectraError, ValueError):
    """Two scalars (or a scalar and a configuration) live in different fields."""


class ScalarDivisionError(PointSpectraError, ZeroDivisionError):
    pass


class NotASquareError(PointSpectraError, ValueError):
    """The scalar has no square root inside its field."""


class IndexOutOfRangeError(PointSpectraError, IndexError):
    pass


class WrongArityError(PointSpectraError, ValueError):
    pass


class ArityMismatchError(PointSpectraError, ValueError):
    pass


class MissingDistanceError(PointSpectraError, KeyError):
    pass


class WrongNError(PointSpectraError, ValueError):
    pass


class NonPositiveBinError(PointSpectraError, ValueError):
    pass


class ShapeMismatchError(PointSpectraError, ValueError):
    pass


class DegenerateFrameError(PointSpectraError):
    """All simplex volumes vanish, so no affine frame exists."""


class DegreeMismatchError(PointSpectraError, ValueError):
    pass


class TooLargeError(PointSpectraError):
    """The requested exhaustive computation is beyond the supported size."""


class SizeMismatchError(PointSpectraError, ValueError):
    pass


class RankDeficientError(PointSpectraError):
    pass


class DuplicateIndexError(PointSpectraError, ValueError):
    pass


class SearchBudgetExceededError(PointSpectraError):
    pass


class AllVolumesZeroError(PointSpectraError):
    pass


class BudgetExceededError(PointSpectraError):
    """Raised when an enumeration stops early; `partial` holds what was found."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class DocumentParseError(PointSpectraError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class HypothesisUnmet(UserWarning):
    """A probe ran although the configuration violates its hypotheses."""
