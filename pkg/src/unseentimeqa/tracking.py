"""Temporal location oracle for packages.

Two independent routes compute "where is package p at minute m":

* :func:`build_timeline` assembles a package's full location timeline as a
  list of half-open segments by walking its linked events (its own loads
  and unloads, plus vehicle movements made while it is aboard);
* :func:`simulate_minutes` answers one query by stepping the world state
  minute by minute from the origin, sharing no interval logic with the
  timeline builder.

Agreement between the two routes is the core correctness check for every
persisted sample.

Answer-set semantics at minute ``m`` (intervals are half-open, so an event
covers ``start <= m < end``):

* during the package's own load or unload — the transfer location *and*
  the vehicle (the package may be at either);
* aboard a vehicle that is moving — the vehicle only;
* aboard a parked vehicle — the vehicle and its current location;
* on the ground — the location only.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from . import domain
from .domain import carried_packages
from .errors import ClockResolutionError, TimelineRangeError
from .planning import Scenario
from .rendering import format_clock, parse_clock
from .scheduling import TimedSchedule

MINUTES_PER_DAY = 24 * 60


@dataclass(frozen=True)
class AnswerSet:
    """A query answer: at most one location and at most one vehicle,
    never empty.  ``as_tuple`` orders the location first."""

    location: str | None = None
    vehicle: str | None = None

    def __post_init__(self) -> None:
        assert self.location or self.vehicle, "empty answer set"

    def as_tuple(self) -> tuple[str, ...]:
        parts = []
        if self.location:
            parts.append(self.location)
        if self.vehicle:
            parts.append(self.vehicle)
        return tuple(parts)

    def __contains__(self, entity: str) -> bool:
        return entity in (self.location, self.vehicle)

    def __str__(self) -> str:
        return "{" + ", ".join(self.as_tuple()) + "}"


@dataclass(frozen=True)
class PackageTimeline:
    """One package's complete location history over a schedule.

    ``segments`` are ``(start, end, answers)`` triples with half-open
    ``[start, end)`` coverage; they tile ``[0, span_end]`` without gaps
    (the final segment extends one past ``span_end`` so the last in-span
    minute is covered).  ``linked`` holds the 1-based plan indices of the
    package's linked events.
    """

    package: str
    linked: tuple[int, ...]
    segments: tuple[tuple[int, int, AnswerSet], ...]

    @property
    def span_end(self) -> int:
        return self.segments[-1][1] - 1


def linked_event_indices(scenario: Scenario, package: str) -> tuple[int, ...]:
    """Plan indices of the package's loads/unloads and of vehicle movements
    made while it is aboard, in plan order."""
    aboard = carried_packages(scenario.plan)
    out = []
    for i, ev in enumerate(scenario.plan, start=1):
        if domain.is_transfer(ev.kind):
            if ev.package == package:
                out.append(i)
        elif package in aboard[i - 1]:
            out.append(i)
    return tuple(out)


def build_timeline(scenario: Scenario, schedule: TimedSchedule,
                   package: str) -> PackageTimeline:
    """Assemble the package's segment timeline for one schedule.

    Works for serial and parallel schedules alike: a package's linked
    events never overlap each other (each waits for the previous one), so
    walking them in plan order with their scheduled windows tiles the span.
    """
    if package not in scenario.world.packages:
        raise KeyError(f"unknown package {package!r}")
    linked = linked_event_indices(scenario, package)
    span_end = schedule.span_end
    segments: list[tuple[int, int, AnswerSet]] = []

    def emit(start: int, end: int, answers: AnswerSet) -> None:
        if start < end:
            segments.append((start, end, answers))

    cursor = 0
    ground: str | None = scenario.init.position[package]
    vehicle_at: dict[str, str] = {}  # carrier's location while p is aboard
    carrier: str | None = None
    for i in linked:
        te = schedule[i]
        ev = te.event
        if domain.is_transfer(ev.kind):
            if domain.is_load(ev.kind):
                emit(cursor, te.start, AnswerSet(location=ground))
                emit(te.start, te.end,
                     AnswerSet(location=ev.location, vehicle=ev.vehicle))
                carrier, ground = ev.vehicle, None
                vehicle_at[ev.vehicle] = ev.location
            else:
                emit(cursor, te.start,
                     AnswerSet(location=ev.location, vehicle=ev.vehicle))
                emit(te.start, te.end,
                     AnswerSet(location=ev.location, vehicle=ev.vehicle))
                carrier, ground = None, ev.location
        else:
            emit(cursor, te.start,
                 AnswerSet(location=vehicle_at[ev.vehicle],
                           vehicle=ev.vehicle))
            emit(te.start, te.end, AnswerSet(vehicle=ev.vehicle))
            vehicle_at[ev.vehicle] = ev.dest
        cursor = te.end

    if carrier is not None:
        tail = AnswerSet(location=vehicle_at[carrier], vehicle=carrier)
    else:
        tail = AnswerSet(location=ground)
    emit(cursor, span_end + 1, tail)

    return PackageTimeline(package, linked, tuple(segments))


def locate_at(timeline: PackageTimeline, minute: int) -> AnswerSet:
    """Answer set at an in-span minute; half-open segments mean a boundary
    minute belongs to the later segment."""
    if not 0 <= minute <= timeline.span_end:
        raise TimelineRangeError(
            f"minute {minute} outside scheduled span "
            f"[0, {timeline.span_end}]"
        )
    starts = [seg[0] for seg in timeline.segments]
    idx = bisect.bisect_right(starts, minute) - 1
    start, end, answers = timeline.segments[idx]
    assert start <= minute < end
    return answers


def resolve_clock(schedule: TimedSchedule, clock: str) -> int:
    """Map a 12-hour reading to the unique in-span relative minute.

    The reading is interpreted relative to the schedule's origin clock;
    because spans never exceed 23 hours the in-span minute is unique.
    Raises :class:`ClockResolutionError` when the reading names no in-span
    minute.
    """
    target = parse_clock(clock)
    base = (target - schedule.origin_clock) % MINUTES_PER_DAY
    candidates = [m for m in (base, base + MINUTES_PER_DAY)
                  if m <= schedule.span_end]
    if not candidates:
        raise ClockResolutionError(
            f"{clock} does not occur within the scheduled span "
            f"(origin {format_clock(schedule.origin_clock)}, "
            f"span {schedule.span_end} minutes)"
        )
    if len(candidates) > 1:  # impossible while spans respect SPAN_CAP
        raise ClockResolutionError(
            f"{clock} is ambiguous within the scheduled span"
        )
    return candidates[0]


def simulate_minutes(scenario: Scenario, schedule: TimedSchedule,
                     package: str, minute: int) -> AnswerSet:
    """Independent oracle: step world state one minute at a time.

    Maintains entity positions and the set of active events; completions
    take effect at their end minute (so a boundary query sees the later
    state), starts take effect at their start minute.
    """
    if package not in scenario.world.packages:
        raise KeyError(f"unknown package {package!r}")
    span_end = schedule.span_end
    if not 0 <= minute <= span_end:
        raise TimelineRangeError(
            f"minute {minute} outside scheduled span [0, {span_end}]"
        )

    starts_at: dict[int, list] = {}
    ends_at: dict[int, list] = {}
    for te in schedule.events:
        starts_at.setdefault(te.start, []).append(te)
        ends_at.setdefault(te.end, []).append(te)

    position = dict(scenario.init.position)
    active: dict[int, object] = {}
    for now in range(minute + 1):
        for te in ends_at.get(now, ()):
            active.pop(te.index, None)
            ev = te.event
            if domain.is_load(ev.kind):
                position[ev.package] = ev.vehicle
            elif domain.is_unload(ev.kind):
                position[ev.package] = ev.location
            else:
                position[ev.vehicle] = ev.dest
        for te in starts_at.get(now, ()):
            active[te.index] = te.event

    for ev in active.values():
        if domain.is_transfer(ev.kind) and ev.package == package:
            return AnswerSet(location=ev.location, vehicle=ev.vehicle)
    pos = position[package]
    if pos in scenario.world.vehicles:
        moving = any(domain.is_movement(ev.kind) and ev.vehicle == pos
                     for ev in active.values())
        if moving:
            return AnswerSet(vehicle=pos)
        return AnswerSet(location=position[pos], vehicle=pos)
    return AnswerSet(location=pos)


__all__ = [
    "AnswerSet", "PackageTimeline", "linked_event_indices",
    "build_timeline", "locate_at", "resolve_clock", "simulate_minutes",
]
