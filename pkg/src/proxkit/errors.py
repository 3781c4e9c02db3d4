"""Exception types raised across the toolkit.

Names follow the error vocabulary used in reports and CLI messages, so
callers can catch a specific failure (e.g. ``DuplicateKey``) or anything
from this package via ``ProxkitError``.
"""

from __future__ import annotations


class ProxkitError(Exception):
    """Base class for all toolkit errors."""


# -- annotation files -------------------------------------------------


class AnnotationFormatError(ProxkitError):
    """Malformed annotation CSV or sidecar content.

    ``line`` is the 1-based line number in the offending file when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingHeader(AnnotationFormatError):
    pass


class UnknownZoneCode(AnnotationFormatError):
    pass


class DuplicateKey(AnnotationFormatError):
    pass


class NonMonotoneStride(AnnotationFormatError):
    """frame_index is not a multiple of the session's frame stride."""


class InvalidSet(ProxkitError):
    """An annotation set failed validation; carries the full report."""

    def __init__(self, report):
        self.report = report
        lines = "; ".join(f"{loc}: {msg}" for loc, msg in report.errors)
        super().__init__(f"annotation set failed validation: {lines}")


# -- metrics -----------------------------------------------------------


class AllOffScreen(ProxkitError):
    """Every sampled frame of a track is off-screen; metrics are undefined."""

    def __init__(self, track_id: str = ""):
        self.track_id = track_id
        detail = f" for track {track_id!r}" if track_id else ""
        super().__init__(f"sequence is entirely off-screen{detail}")


class UnknownCoderPass(ProxkitError):
    pass


# -- reliability -------------------------------------------------------


class EmptySlice(ProxkitError):
    pass


class NoOverlap(ProxkitError):
    pass


class NoPairs(ProxkitError):
    pass


# -- surveys -----------------------------------------------------------


class SurveyFormatError(ProxkitError):
    """Malformed survey CSV content; ``row`` is the 1-based data row."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class MissingSelfPlacement(SurveyFormatError):
    pass


class ResponseOutOfRange(SurveyFormatError):
    pass


class BadPlacementCoordinate(SurveyFormatError):
    pass


class MissingAgentPlacement(ProxkitError):
    pass


# -- triangulation -----------------------------------------------------


class DuplicateLinkKey(ProxkitError):
    pass


class DanglingReference(ProxkitError):
    pass


class AmbiguousMetricsKey(ProxkitError):
    pass


class ConstantColumn(ProxkitError):
    pass


class TooFewValues(ProxkitError):
    pass


class LengthMismatch(ProxkitError):
    pass


class ConstantInput(ProxkitError):
    pass


# -- synthetic generator -----------------------------------------------


class InvalidConfig(ProxkitError):
    pass


# -- annotation service ------------------------------------------------


class DuplicateSession(ProxkitError):
    pass


class MissingFrameFile(ProxkitError):
    pass


class StrideMismatch(ProxkitError):
    pass


class UnknownSession(ProxkitError):
    pass


class UnknownFrame(ProxkitError):
    pass


class UnknownTrack(ProxkitError):
    pass


class UnknownLabelKey(ProxkitError):
    """A note was posted for a (coder, pass, frame, track) with no label yet."""
