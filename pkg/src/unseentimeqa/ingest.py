"""Rebuild runnable scenarios from narrated record text.

This is the reverse of the rendering layer: objects/init prose becomes a
world and initial state, narrated event sentences become a timed plan, and
the question sentence becomes a structured query.  It exists so that any
externally produced narration can be re-answered by the oracle, which is
how the package checks itself against known-good samples.

The temporal reconstruction depends on the tier family:

* easy — every sentence carries start and end clocks; relative minutes are
  recovered by walking the clocks forward from the first start (readings
  may wrap midnight);
* medium — start clocks plus durations, walked the same way;
* hard — durations only; the schedule is rebuilt with the zero-gap serial
  or earliest-start parallel rules and pinned to the wall clock by the
  question's anchoring clause.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from . import domain
from .domain import World, WorldState
from .errors import OracleMismatchError, PlanTextError, SpanError
from .planning import Scenario
from .rendering import (ParsedQuestion, match_clause_index, parse_clock,
                        parse_event_line, parse_question_text, tier_family,
                        EVENTS_HEADER)
from .scheduling import (CLOCK_UNIQUE_SPAN, SERIAL, Perturbation,
                         TimedEvent, TimedSchedule, apply_perturbation,
                         schedule_parallel, schedule_serial)
from .tracking import (AnswerSet, build_timeline, locate_at, resolve_clock,
                       simulate_minutes)

MINUTES_PER_DAY = 24 * 60

_COUNT_SENTENCE = {
    "cities": re.compile(r"there (?:are|is) \d+ cit(?:ies|y), ([^.]+)\."),
    "locations": re.compile(r"there (?:are|is) \d+ locations?, ([^.]+)\."),
    "airports": re.compile(
        r"[Tt]he locations? of the airports? (?:are|is) ([^.]+)\."),
    "airplanes": re.compile(r"there (?:are|is) \d+ airplanes?, ([^.]+)\."),
    "trucks": re.compile(r"there (?:are|is) \d+ trucks?, ([^.]+)\."),
    "packages": re.compile(r"there (?:are|is) \d+ packages?, ([^.]+)\."),
}
_CITY_MEMBERS = re.compile(
    r"locations? ([^.]+?) (?:are|is) in city (c\d+)\.")
_LIST_SPLIT = re.compile(r",\s*(?:and\s+)?|\s+and\s+")
_INIT_SENTENCE = re.compile(
    r"\b(?:truck|airplane|package)\s+([tap]\d+)\s+is\s+at\s+(?:the\s+)?"
    r"location\s+(l\d+_\d+)")


def _id_list(text: str) -> list[str]:
    return [t for t in (s.strip() for s in _LIST_SPLIT.split(text)) if t]


def parse_objects_text(text: str) -> World:
    """Recover a world from inventory prose."""
    found: dict[str, list[str]] = {}
    for name, rx in _COUNT_SENTENCE.items():
        m = rx.search(text)
        if not m:
            raise PlanTextError(f"objects prose lacks a {name} sentence")
        found[name] = _id_list(m.group(1))
    city_of: dict[str, str] = {}
    for members, city in _CITY_MEMBERS.findall(text):
        for loc in _id_list(members):
            city_of[loc] = city
    missing = [l for l in found["locations"] if l not in city_of]
    if missing:
        raise PlanTextError(f"no city stated for locations {missing}")
    return World(
        cities=tuple(found["cities"]),
        locations=tuple(found["locations"]),
        city_of=city_of,
        airports=frozenset(found["airports"]),
        trucks=tuple(found["trucks"]),
        airplanes=tuple(found["airplanes"]),
        packages=tuple(found["packages"]),
    )


def parse_init_text(text: str, world: World) -> WorldState:
    """Recover the initial state from position prose."""
    position = {entity: loc for entity, loc in _INIT_SENTENCE.findall(text)}
    missing = [e for e in world.movables if e not in position]
    if missing:
        raise PlanTextError(f"initial state says nothing about {missing}")
    return WorldState(position)


def split_events_text(text: str) -> list[str]:
    """Split an events paragraph into sentences, dropping the header line.

    Tolerates a missing space after a sentence period.
    """
    body = text.strip()
    if body.startswith(EVENTS_HEADER):
        body = body[len(EVENTS_HEADER):].strip()
    return [s.strip() for s in re.split(r"(?<=\.)(?:\s+|(?=[A-Za-z]))", body)
            if s.strip()]


def _serial_events_from_clocks(parsed, plan) -> tuple[list[TimedEvent], int]:
    """Convert per-event clock readings into relative minutes by walking
    forward from the first start (readings may wrap midnight)."""
    origin = parse_clock(parsed[0].start_clock)
    events: list[TimedEvent] = []
    cursor = 0  # relative minute of the previous event's end
    for i, (line, ev) in enumerate(zip(parsed, plan), start=1):
        start_abs = parse_clock(line.start_clock)
        rel = cursor + (start_abs - (origin + cursor)) % MINUTES_PER_DAY
        if line.duration is not None:
            dur = line.duration
        else:
            dur = (parse_clock(line.end_clock) - start_abs) % MINUTES_PER_DAY
            if dur == 0:
                raise PlanTextError(
                    f"event {i} starts and ends at {line.start_clock}"
                )
        events.append(TimedEvent(i, ev, dur, rel, rel + dur))
        cursor = rel + dur
    if cursor > CLOCK_UNIQUE_SPAN:
        raise SpanError(
            f"narrated schedule spans {cursor} minutes; clock readings "
            f"stop being unique past {CLOCK_UNIQUE_SPAN}"
        )
    return events, origin


@dataclass(frozen=True)
class IngestedRecord:
    """A narrated record parsed back into oracle inputs.

    ``schedule`` is the base (unperturbed) schedule with its origin clock
    already pinned; ``anchor_index``/``perturbation`` come from the
    question's clauses.
    """

    tier: str
    scenario: Scenario
    schedule: TimedSchedule
    question: ParsedQuestion
    anchor_index: int | None
    perturbation: Perturbation | None


def ingest_record(*, tier: str, objects_text: str, init_text: str,
                  event_lines: list[str], question_text: str
                  ) -> IngestedRecord:
    """Parse one narrated record into an :class:`IngestedRecord`."""
    world = parse_objects_text(objects_text)
    init = parse_init_text(init_text, world)
    parsed = [parse_event_line(line, tier) for line in event_lines]
    plan = tuple(p.event for p in parsed)
    report = domain.validate_plan(world, init, plan)
    if not report.ok:
        raise PlanTextError(
            f"narrated events are not a valid plan: event "
            f"{report.failed_index} — {report.reason}"
        )
    scenario = Scenario(0, world, init, {}, plan)

    question = parse_question_text(question_text)
    perturbation = None
    if question.perturbation_clause is not None:
        perturbation = Perturbation(
            match_clause_index(plan, question.perturbation_clause),
            question.perturbation_kind, question.perturbation_minutes,
        )
    anchor_index = None
    if question.anchor_clause is not None:
        anchor_index = match_clause_index(plan, question.anchor_clause)

    family = tier_family(tier)
    if family in ("easy", "medium"):
        events, origin = _serial_events_from_clocks(parsed, plan)
        schedule = TimedSchedule(SERIAL, origin, tuple(events))
    else:
        durations = tuple(p.duration for p in parsed)
        if tier == "hard_parallel":
            schedule = schedule_parallel(plan, durations,
                                         span_cap=CLOCK_UNIQUE_SPAN)
        else:
            schedule = schedule_serial(plan, durations, gapped=False,
                                       span_cap=CLOCK_UNIQUE_SPAN)
        if anchor_index is None:
            raise PlanTextError(
                "a duration-only narration needs an anchoring clause to "
                "pin its wall clock"
            )
        effective = (apply_perturbation(schedule, perturbation)
                     if perturbation else schedule)
        anchor_rel = effective[anchor_index].start
        origin = (parse_clock(question.anchor_clock)
                  - anchor_rel) % MINUTES_PER_DAY
        schedule = replace(schedule, origin_clock=origin)
    return IngestedRecord(tier, scenario, schedule, question,
                          anchor_index, perturbation)


def answer_ingested(rec: IngestedRecord) -> AnswerSet:
    """Answer an ingested record through the full oracle path.

    Applies the hypothetical perturbation (if any), resolves the query
    clock, applies the relative-hours offset, and checks the timeline
    answer against the independent minute simulation before returning it.
    """
    schedule = rec.schedule
    if rec.perturbation is not None:
        schedule = apply_perturbation(schedule, rec.perturbation)
    minute = resolve_clock(schedule, rec.question.query_clock)
    minute += 60 * rec.question.offset_hours
    timeline = build_timeline(rec.scenario, schedule, rec.question.package)
    answer = locate_at(timeline, minute)
    check = simulate_minutes(rec.scenario, schedule, rec.question.package,
                             minute)
    if answer != check:
        raise OracleMismatchError(
            f"timeline says {answer}, simulation says {check} for "
            f"package {rec.question.package} at minute {minute}"
        )
    return answer


__all__ = [
    "parse_objects_text", "parse_init_text", "split_events_text",
    "IngestedRecord", "ingest_record", "answer_ingested",
]
