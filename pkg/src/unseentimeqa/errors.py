"""Exception taxonomy for the unseentimeqa toolkit.

Every failure mode raised by the package derives from :class:`UnseenTimeQAError`
so callers (including the CLI) can distinguish tool errors from programming
bugs.  Subclasses are grouped by the layer that raises them.
"""

from __future__ import annotations


class UnseenTimeQAError(Exception):
    """Base class for all errors raised by this package."""


# --- world / event layer ---------------------------------------------------

class WorldError(UnseenTimeQAError):
    """A world description is structurally invalid."""


class MalformedEventError(UnseenTimeQAError):
    """An event is structurally invalid regardless of state (bad ids, a
    truck route crossing cities, a flight inside one city, ...)."""


class PreconditionError(UnseenTimeQAError):
    """A structurally valid event cannot apply to the given state."""


# --- plan layer ------------------------------------------------------------

class PlanningError(UnseenTimeQAError):
    """Scenario generation could not produce a valid plan."""


class PlanTextError(UnseenTimeQAError):
    """Plan interchange text is unreadable or semantically invalid."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


# --- scheduling layer ------------------------------------------------------

class SpanError(UnseenTimeQAError):
    """A schedule spans more than the clock-uniqueness cap (23 hours)."""


class DependencyCycleError(UnseenTimeQAError):
    """The event dependency graph contains a cycle (internal invariant)."""


class PerturbationError(UnseenTimeQAError):
    """A perturbation request is out of range for its target event."""


# --- oracle layer ----------------------------------------------------------

class TimelineRangeError(UnseenTimeQAError):
    """A queried minute falls outside the scheduled span."""


class ClockParseError(UnseenTimeQAError):
    """A clock string is not a valid zero-padded 12-hour reading."""


class ClockResolutionError(UnseenTimeQAError):
    """A clock reading does not resolve to a unique in-span minute."""


# --- question layer --------------------------------------------------------

class DepthError(UnseenTimeQAError):
    """A query minute resolves before its anchor event starts."""


class SamplingMissError(UnseenTimeQAError):
    """A question draw found no admissible query; the caller may retry
    with the next derived seed."""


class QuestionParseError(UnseenTimeQAError):
    """Question text could not be parsed back into a structured query."""


# --- rendering layer -------------------------------------------------------

class TemplateParseError(UnseenTimeQAError):
    """An event sentence does not match any known template shape."""


class ContaminationError(UnseenTimeQAError):
    """A few-shot exemplar overlaps the record under evaluation."""


# --- dataset / evaluation layer --------------------------------------------

class SchemaError(UnseenTimeQAError):
    """A serialized record violates the record schema.

    ``path`` points at the offending field, e.g. ``$.answers[0]``.
    """

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class OracleMismatchError(UnseenTimeQAError):
    """A persisted record disagrees with the independent minute simulation."""


class CoverageError(UnseenTimeQAError):
    """A response file does not cover every record selected for scoring."""


class ConfigError(UnseenTimeQAError):
    """A configuration file or override is invalid."""
