"""Event timing: durations, serial and parallel schedules, perturbations.

Times are integer minutes relative to the scenario origin (minute 0 is when
the first event may begin).  Each timed event occupies the half-open
interval ``[start, end)`` with ``end = start + duration``.

Serial schedules run events strictly in plan order, separated by idle gaps
(zero gaps for the duration-only serial tier).  Parallel schedules assign
each event its earliest start under a dependency graph with three rule
families:

* package chain — every event involving a package (its loads/unloads, and
  movements made while it is aboard) waits for that package's previous
  such event;
* vehicle chain — a vehicle movement waits for every load/unload of that
  vehicle since its previous movement, and every load/unload waits for
  the movement that brought the vehicle to that stop;
* stop barrier — at one vehicle stop, every load waits for every unload,
  so arriving cargo leaves the vehicle before new cargo boards.

The whole span must stay within ``SPAN_CAP`` minutes so that every 12-hour
clock reading names a unique minute of the span.

A perturbation changes one event's *duration*.  In a serial schedule all
later events shift by the same amount, preserving gaps; in a parallel
schedule only dependents of the target can move (earliest starts are
recomputed).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import domain
from .domain import GroundEvent, carried_packages
from .errors import (DependencyCycleError, PerturbationError, SpanError)
from .seeds import rng_for

DURATION_RANGE = (2, 95)
GAP_RANGE = (1, 8)
# Generated schedules stay within 23 hours, leaving headroom under the
# hard bound at which clock readings would stop naming unique minutes.
SPAN_CAP = 23 * 60
CLOCK_UNIQUE_SPAN = 24 * 60 - 1

SERIAL = "serial"
PARALLEL = "parallel"

DELAY = "delay"
EXPEDITE = "expedite"
PERTURBATION_RANGE = (4, 90)


@dataclass(frozen=True)
class TimedEvent:
    """One plan event with its schedule: occupies ``[start, end)``."""

    index: int  # 1-based plan position
    event: GroundEvent
    duration: int
    start: int
    end: int


@dataclass(frozen=True)
class TimedSchedule:
    """A complete timing of one plan.

    ``events`` is in plan order.  ``deps`` holds (earlier, later) index
    pairs for parallel schedules (None for serial ones).  ``origin_clock``
    is the wall-clock minute past midnight at relative minute 0.
    """

    mode: str
    origin_clock: int
    events: tuple[TimedEvent, ...]
    deps: frozenset[tuple[int, int]] | None = None

    @property
    def span_end(self) -> int:
        return max(te.end for te in self.events)

    @property
    def makespan(self) -> int:
        return self.span_end - min(te.start for te in self.events)

    def __getitem__(self, index: int) -> TimedEvent:
        """Timed event by 1-based plan index."""
        if not 1 <= index <= len(self.events):
            raise IndexError(f"plan index {index} out of range "
                             f"1..{len(self.events)}")
        te = self.events[index - 1]
        assert te.index == index
        return te

    @property
    def durations(self) -> tuple[int, ...]:
        return tuple(te.duration for te in self.events)


def assign_durations(plan, seed: int,
                     duration_range: tuple[int, int] = DURATION_RANGE
                     ) -> tuple[int, ...]:
    """Independent uniform durations for every plan event."""
    rng = rng_for("durations", seed)
    lo, hi = duration_range
    return tuple(rng.randint(lo, hi) for _ in plan)


def _check_durations(plan, durations) -> None:
    if len(durations) != len(plan):
        raise ValueError(
            f"{len(durations)} durations for {len(plan)} events"
        )
    for i, d in enumerate(durations, start=1):
        if d < 1:
            raise ValueError(f"event {i} has non-positive duration {d}")


def schedule_serial(plan, durations, *, origin_clock: int = 0,
                    gapped: bool = True, seed: int = 0,
                    gap_range: tuple[int, int] = GAP_RANGE,
                    span_cap: int = SPAN_CAP) -> TimedSchedule:
    """Chain events in plan order.

    With ``gapped`` the inter-event idle times are drawn uniformly from
    ``gap_range``; otherwise each event starts the minute its predecessor
    ends.  Raises :class:`SpanError` if the last event ends after
    ``span_cap``.
    """
    _check_durations(plan, durations)
    rng = rng_for("gaps", seed) if gapped else None
    events: list[TimedEvent] = []
    clock = 0
    for i, (ev, dur) in enumerate(zip(plan, durations), start=1):
        if i > 1:
            clock += rng.randint(*gap_range) if rng else 0
        events.append(TimedEvent(i, ev, dur, clock, clock + dur))
        clock += dur
    if clock > span_cap:
        raise SpanError(
            f"serial schedule spans {clock} minutes (cap {span_cap})"
        )
    return TimedSchedule(SERIAL, origin_clock % (24 * 60), tuple(events))


def build_dependency_graph(plan) -> frozenset[tuple[int, int]]:
    """Dependency edges ``(i, j)``: event ``i`` must end before ``j`` starts.

    Implements the package-chain, vehicle-chain, and stop-barrier rules
    described in the module docstring.  Indices are 1-based plan positions;
    every edge points forward in plan order, which also proves acyclicity
    (checked defensively).
    """
    edges: set[tuple[int, int]] = set()
    aboard = carried_packages(plan)

    # package chains
    last_for_package: dict[str, int] = {}
    for j, ev in enumerate(plan, start=1):
        involved: tuple[str, ...]
        if domain.is_transfer(ev.kind):
            involved = (ev.package,)
        else:
            involved = tuple(sorted(aboard[j - 1]))
        for p in involved:
            if p in last_for_package:
                edges.add((last_for_package[p], j))
            last_for_package[p] = j

    # vehicle chains and stop barriers
    last_move: dict[str, int] = {}
    stop_transfers: dict[str, list[int]] = {}
    for j, ev in enumerate(plan, start=1):
        v = ev.vehicle
        if domain.is_movement(ev.kind):
            for t in stop_transfers.pop(v, []):
                edges.add((t, j))
            last_move[v] = j
        else:
            if v in last_move:
                edges.add((last_move[v], j))
            if domain.is_load(ev.kind):
                for t in stop_transfers.get(v, []):
                    if domain.is_unload(plan[t - 1].kind):
                        edges.add((t, j))
            stop_transfers.setdefault(v, []).append(j)

    for i, j in edges:
        if not i < j:
            raise DependencyCycleError(
                f"edge {i}->{j} runs against plan order"
            )
    return frozenset(edges)


def schedule_parallel(plan, durations, *, origin_clock: int = 0,
                      deps: frozenset[tuple[int, int]] | None = None,
                      span_cap: int = SPAN_CAP) -> TimedSchedule:
    """Earliest-start schedule under the dependency graph.

    Events without prerequisites start at minute 0; every other event
    starts the minute its last prerequisite ends.
    """
    _check_durations(plan, durations)
    if deps is None:
        deps = build_dependency_graph(plan)
    else:
        for i, j in deps:
            if not 1 <= i < j <= len(plan):
                raise DependencyCycleError(
                    f"edge {i}->{j} runs against plan order"
                )
    parents: dict[int, list[int]] = {}
    for i, j in deps:
        parents.setdefault(j, []).append(i)
    events: list[TimedEvent] = []
    end_of: dict[int, int] = {}
    for j, (ev, dur) in enumerate(zip(plan, durations), start=1):
        start = max((end_of[i] for i in parents.get(j, ())), default=0)
        end_of[j] = start + dur
        events.append(TimedEvent(j, ev, dur, start, start + dur))
    span = max(end_of.values())
    if span > span_cap:
        raise SpanError(
            f"parallel schedule spans {span} minutes (cap {span_cap})"
        )
    return TimedSchedule(PARALLEL, origin_clock % (24 * 60), tuple(events),
                         deps=deps)


@dataclass(frozen=True)
class Perturbation:
    """A hypothetical change to one event's duration.

    ``kind`` is :data:`DELAY` (duration grows by ``minutes``) or
    :data:`EXPEDITE` (duration shrinks; at most ``duration - 1`` so the
    event keeps a positive length).  ``target`` is a 1-based plan index.
    """

    target: int
    kind: str
    minutes: int

    def __post_init__(self) -> None:
        if self.kind not in (DELAY, EXPEDITE):
            raise PerturbationError(
                f"unknown perturbation kind {self.kind!r}")
        if self.minutes < 1:
            raise PerturbationError(
                f"a perturbation must move at least 1 minute, "
                f"got {self.minutes}")
        if self.target < 1:
            raise PerturbationError(
                f"target must be a 1-based plan index, got {self.target}")

    def signed_minutes(self) -> int:
        return self.minutes if self.kind == DELAY else -self.minutes


def descendants(deps: frozenset[tuple[int, int]], target: int) -> frozenset[int]:
    """All events reachable from ``target`` through dependency edges."""
    children: dict[int, list[int]] = {}
    for i, j in deps:
        children.setdefault(i, []).append(j)
    seen: set[int] = set()
    stack = [target]
    while stack:
        for j in children.get(stack.pop(), ()):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return frozenset(seen)


def apply_perturbation(schedule: TimedSchedule,
                       perturbation: Perturbation) -> TimedSchedule:
    """Reschedule with the target's duration changed.

    Serial mode keeps every inter-event gap, so all later events shift by
    the signed change.  Parallel mode recomputes earliest starts, which
    moves (at most) the dependents of the target.  A perturbed schedule
    may exceed the generation span cap but never the clock-uniqueness
    bound.
    """
    p = perturbation
    if not 1 <= p.target <= len(schedule.events):
        raise PerturbationError(f"no event with index {p.target}")
    if p.kind not in (DELAY, EXPEDITE):
        raise PerturbationError(f"unknown perturbation kind {p.kind!r}")
    if p.minutes < 1:
        raise PerturbationError(f"perturbation of {p.minutes} minutes")
    old = schedule[p.target]
    if p.kind == EXPEDITE and p.minutes > old.duration - 1:
        raise PerturbationError(
            f"cannot expedite a {old.duration}-minute event by {p.minutes} "
            f"minutes (limit {old.duration - 1})"
        )
    new_durations = list(schedule.durations)
    new_durations[p.target - 1] += p.signed_minutes()

    if schedule.mode == SERIAL:
        events: list[TimedEvent] = []
        shift = 0
        for te, dur in zip(schedule.events, new_durations):
            start = te.start + shift
            events.append(replace(te, duration=dur, start=start,
                                  end=start + dur))
            shift += dur - te.duration
        if events[-1].end > CLOCK_UNIQUE_SPAN:
            raise SpanError(
                f"perturbed schedule spans {events[-1].end} minutes "
                f"(cap {CLOCK_UNIQUE_SPAN})"
            )
        return replace(schedule, events=tuple(events))

    plan = tuple(te.event for te in schedule.events)
    return schedule_parallel(plan, tuple(new_durations),
                             origin_clock=schedule.origin_clock,
                             deps=schedule.deps,
                             span_cap=CLOCK_UNIQUE_SPAN)


__all__ = [
    "DURATION_RANGE", "GAP_RANGE", "SPAN_CAP", "CLOCK_UNIQUE_SPAN",
    "SERIAL", "PARALLEL",
    "DELAY", "EXPEDITE", "PERTURBATION_RANGE",
    "TimedEvent", "TimedSchedule", "Perturbation",
    "assign_durations", "schedule_serial", "build_dependency_graph",
    "schedule_parallel", "descendants", "apply_perturbation",
]
