"""Exception hierarchy.

Every failure the engine can report is a subclass of :class:`TrendlabError`.
Data problems (bad files, bad calendars) derive from :class:`DataError`;
problems that arise while computing derive from :class:`EngineError`. The CLI
maps the two families onto distinct exit codes.
"""

from __future__ import annotations


class TrendlabError(Exception):
    """Base class for all typed errors raised by trendlab."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class DataError(TrendlabError, ValueError):
    pass


class EngineError(TrendlabError):
    pass


class EmptySeries(DataError):
    pass


class InvalidPrice(DataError):
    pass


class RangeViolation(DataError):
    pass


class CalendarViolation(DataError):
    pass


class DuplicateLabel(DataError):
    pass


class OrderViolation(DataError):
    pass


class FormatError(DataError):
    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class NoOverlap(DataError):
    pass


class InsufficientHistory(EngineError):
    pass


class InsufficientData(EngineError):
    pass


class NoVariance(EngineError):
    pass


class InvalidConfig(EngineError, ValueError):
    pass


class DegenerateStudy(EngineError):
    pass


class AnachronisticKeyword(EngineError):
    pass


class FutureAccess(TrendlabError, LookupError):
    """A read reached past the as-of date of a logged view.

    This is the look-ahead detector firing, not a crash.
    """

    def __init__(self, requested, series_id: str, as_of):
        super().__init__(f"{series_id}: read of {requested} after as-of {as_of}")
        self.requested = requested
        self.series_id = series_id
        self.as_of = as_of
