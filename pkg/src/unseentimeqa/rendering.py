"""Natural-language rendering of scenarios, events, and questions.

Every scheduled event is narrated by one of four sentence templates per
(tier family, event family).  Tier families expose exactly their tier's
temporal fields:

* ``easy``   — start and end clock readings;
* ``medium`` — start clock reading and duration;
* ``hard``   — duration only (shared by both hard tiers).

Clocks are zero-padded 12-hour readings (``"01:05 PM"``).  Spans stay
within 23 hours, so a reading names a unique minute of a schedule.

Parsing is deliberately more lenient than rendering: entity ids, clock
readings, and durations are recovered by shape, so sentences with small
wording variations (missing "is", "flys", swapped motion verbs) still
parse.  Rendering always emits the canonical template text.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from . import domain
from .domain import GroundEvent
from .errors import (ClockParseError, ContaminationError, QuestionParseError,
                     TemplateParseError)
from .planning import Scenario
from .scheduling import PARALLEL, TimedEvent, TimedSchedule
from .seeds import rng_for

MINUTES_PER_DAY = 24 * 60


# --- clock readings ---------------------------------------------------------

def format_clock(minute_of_day: int) -> str:
    """Render a minute past midnight as a zero-padded 12-hour reading."""
    minute_of_day %= MINUTES_PER_DAY
    h24, m = divmod(minute_of_day, 60)
    h12 = h24 % 12 or 12
    half = "AM" if h24 < 12 else "PM"
    return f"{h12:02d}:{m:02d} {half}"


_CLOCK_RE = re.compile(r"^\s*(\d{1,2}):(\d{2})\s*([AP]M)\s*$", re.IGNORECASE)
CLOCK_PATTERN = r"\d{1,2}:\d{2}\s*[AP]M"


def parse_clock(text: str) -> int:
    """Parse a 12-hour reading to a minute past midnight.

    Rejects out-of-dial readings such as ``"13:01 PM"``.
    """
    m = _CLOCK_RE.match(text)
    if not m:
        raise ClockParseError(f"not a clock reading: {text!r}")
    hour, minute, half = int(m.group(1)), int(m.group(2)), m.group(3).upper()
    if not 1 <= hour <= 12:
        raise ClockParseError(f"hour {hour} is off the 12-hour dial: {text!r}")
    if minute > 59:
        raise ClockParseError(f"minute {minute} is invalid: {text!r}")
    base = (hour % 12) * 60 + minute
    return base + (720 if half == "PM" else 0)


def canonical_clock(text: str) -> str:
    return format_clock(parse_clock(text))


# --- event sentence templates ----------------------------------------------

@dataclass(frozen=True)
class TemplateSet:
    """Sentence templates: four variants per (tier family, event family).

    Transfer templates use ``{verb}``/``{prep}``/``{gerund}`` slots that
    expand to loaded/into/loading or unloaded/from/unloading, plus
    ``{vkind}`` for the word truck or airplane.
    """

    easy_transfer: tuple[str, ...]
    easy_drive: tuple[str, ...]
    easy_fly: tuple[str, ...]
    medium_transfer: tuple[str, ...]
    medium_drive: tuple[str, ...]
    medium_fly: tuple[str, ...]
    hard_transfer: tuple[str, ...]
    hard_drive: tuple[str, ...]
    hard_fly: tuple[str, ...]

    def table(self, family: str, event_kind: str) -> tuple[str, ...]:
        if domain.is_transfer(event_kind):
            group = "transfer"
        elif event_kind == domain.DRIVE_TRUCK:
            group = "drive"
        else:
            group = "fly"
        return getattr(self, f"{family}_{group}")


DEFAULT_TEMPLATES = TemplateSet(
    easy_transfer=(
        "at location {l}, package {p} is {verb} {prep} {vkind} {v} "
        "starting at {s} and finishing at {e}.",
        "package {p} is {verb} {prep} {vkind} {v} from {s} to {e} "
        "at location {l}.",
        "{gerund} package {p} {prep} {vkind} {v} at location {l} "
        "starts at {s} and ends at {e}.",
        "from {s} to {e} package {p} {verb} {prep} {vkind} {v} "
        "at location {l}.",
    ),
    easy_drive=(
        "from location {x}, truck {v} moves to location {y} "
        "starting at {s} and finishing at {e}.",
        "truck {v} operates from location {x} to location {y} "
        "from {s} to {e}.",
        "driving truck {v} from location {x} to location {y} "
        "starts at {s} and ends at {e}.",
        "from {s} to {e} truck {v} transports from location {x} "
        "to location {y}.",
    ),
    easy_fly=(
        "from location {x}, airplane {v} transits to location {y} "
        "starting at {s} and finishing at {e}.",
        "airplane {v} flies from location {x} to location {y} "
        "from {s} to {e}.",
        "flying airplane {v} from location {x} to location {y} "
        "starts at {s} and ends at {e}.",
        "from {s} to {e} airplane {v} transits from location {x} "
        "to location {y}.",
    ),
    medium_transfer=(
        "at location {l}, package {p} is {verb} {prep} {vkind} {v} "
        "starting at {s} and continues for {d} minutes.",
        "package {p} is {verb} {prep} {vkind} {v} from {s} at location {l} "
        "and takes {d} minutes to finish.",
        "{gerund} package {p} {prep} {vkind} {v} at location {l} "
        "starts at {s} and ends after {d} minutes.",
        "from {s} package {p} is {verb} {prep} {vkind} {v} at location {l} "
        "for {d} minutes.",
    ),
    medium_drive=(
        "from location {x}, truck {v} moves to location {y} "
        "starting at {s} and continues for {d} minutes.",
        "truck {v} operates from location {x} to location {y} "
        "starting at {s} and takes {d} minutes.",
        "driving truck {v} from location {x} to location {y} "
        "starts at {s} and ends after {d} minutes.",
        "from {s}, truck {v} transports from location {x} to location {y} "
        "for {d} minutes.",
    ),
    medium_fly=(
        "from location {x}, airplane {v} flies to location {y} "
        "starting at {s} and continues for {d} minutes.",
        "airplane {v} flies from location {x} to location {y} "
        "starting at {s} and takes {d} minutes.",
        "flying airplane {v} from location {x} to location {y} "
        "starts at {s} and ends after {d} minutes.",
        "from {s}, airplane {v} transits from location {x} to location {y} "
        "for {d} minutes.",
    ),
    hard_transfer=(
        "at location {l}, package {p} is {verb} {prep} {vkind} {v} "
        "and it takes {d} minutes to finish.",
        "package {p} is {verb} {prep} {vkind} {v} at location {l} "
        "and it requires {d} minutes to complete.",
        "{gerund} package {p} {prep} {vkind} {v} at location {l} "
        "takes {d} minutes to finish.",
        "package {p} is {verb} {prep} {vkind} {v} at location {l} "
        "for {d} minutes.",
    ),
    hard_drive=(
        "from location {x}, truck {v} moves to location {y} "
        "and it takes {d} minutes to finish.",
        "truck {v} operates from location {x} to location {y} "
        "and it requires {d} minutes to complete.",
        "driving truck {v} from location {x} to location {y} "
        "takes {d} minutes to finish.",
        "truck {v} transports from location {x} to location {y} "
        "for {d} minutes.",
    ),
    hard_fly=(
        "from location {x}, airplane {v} transits to location {y} "
        "and it takes {d} minutes to finish.",
        "airplane {v} flies from location {x} to location {y} "
        "and it requires {d} minutes to complete.",
        "flying airplane {v} from location {x} to location {y} "
        "takes {d} minutes to finish.",
        "airplane {v} transits from location {x} to location {y} "
        "for {d} minutes.",
    ),
)

N_VARIANTS = 4

_FAMILY_OF_TIER = {
    "easy": "easy",
    "medium": "medium",
    "hard": "hard",
    "hard_serial": "hard",
    "hard_parallel": "hard",
}


def tier_family(tier: str) -> str:
    try:
        return _FAMILY_OF_TIER[tier]
    except KeyError:
        raise ValueError(f"unknown tier {tier!r}") from None


def _transfer_slots(ev: GroundEvent) -> dict[str, str]:
    unload = domain.is_unload(ev.kind)
    return {
        "p": ev.package,
        "v": ev.vehicle,
        "l": ev.location,
        "vkind": domain.vehicle_kind(ev.kind),
        "verb": "unloaded" if unload else "loaded",
        "prep": "from" if unload else "into",
        "gerund": "unloading" if unload else "loading",
    }


def render_event_line(timed: TimedEvent, tier: str, *, origin_clock: int = 0,
                      variant: int = 0,
                      templates: TemplateSet = DEFAULT_TEMPLATES) -> str:
    """Render one scheduled event as a sentence.

    ``variant`` selects one of the four templates; only the temporal fields
    of the tier family appear in the output.
    """
    family = tier_family(tier)
    ev = timed.event
    table = templates.table(family, ev.kind)
    template = table[variant % N_VARIANTS]
    slots: dict[str, object]
    if domain.is_transfer(ev.kind):
        slots = dict(_transfer_slots(ev))
    else:
        slots = {"v": ev.vehicle, "x": ev.origin, "y": ev.dest}
    slots["s"] = format_clock(origin_clock + timed.start)
    slots["e"] = format_clock(origin_clock + timed.end)
    slots["d"] = timed.duration
    return template.format(**slots)


@dataclass(frozen=True)
class ParsedEventLine:
    """Inverse of :func:`render_event_line`: the event plus whichever
    temporal fields the sentence exposed (clocks are canonicalized)."""

    event: GroundEvent
    start_clock: str | None = None
    end_clock: str | None = None
    duration: int | None = None


_ID_RES = {
    "package": re.compile(r"\bp\d+\b"),
    "truck": re.compile(r"\bt\d+\b"),
    "airplane": re.compile(r"\ba\d+\b"),
    "location": re.compile(r"\bl\d+_\d+\b"),
}
_CLOCK_SCAN = re.compile(CLOCK_PATTERN)
_DURATION_SCAN = re.compile(r"\b(\d+)\s+minutes?\b")
_UNLOAD_WORD = re.compile(r"\bunload", re.IGNORECASE)
_LOAD_WORD = re.compile(r"\bload", re.IGNORECASE)


def _parse_event_core(text: str, *, what: str) -> GroundEvent:
    """Recover the ground event named by a sentence or question clause."""
    packages = _ID_RES["package"].findall(text)
    trucks = _ID_RES["truck"].findall(text)
    airplanes = _ID_RES["airplane"].findall(text)
    locations = _ID_RES["location"].findall(text)

    if trucks and airplanes:
        raise TemplateParseError(
            f"{what} names both a truck and an airplane: {text!r}"
        )
    if not trucks and not airplanes:
        raise TemplateParseError(f"{what} names no vehicle: {text!r}")
    vehicle = (trucks or airplanes)[0]
    truckish = bool(trucks)

    if packages:
        if len(set(packages)) > 1:
            raise TemplateParseError(
                f"{what} names several packages: {text!r}"
            )
        unload = bool(_UNLOAD_WORD.search(text))
        if not unload and not _LOAD_WORD.search(text):
            raise TemplateParseError(
                f"{what} names a package but neither loads nor unloads it: "
                f"{text!r}"
            )
        if len(set(locations)) != 1:
            raise TemplateParseError(
                f"{what} must name exactly one location, got {locations}: "
                f"{text!r}"
            )
        if unload:
            kind = domain.UNLOAD_TRUCK if truckish else domain.UNLOAD_AIRPLANE
        else:
            kind = domain.LOAD_TRUCK if truckish else domain.LOAD_AIRPLANE
        return GroundEvent(kind, vehicle, package=packages[0],
                           location=locations[0])

    if len(locations) != 2:
        raise TemplateParseError(
            f"{what} must name two locations for a movement, got "
            f"{locations}: {text!r}"
        )
    kind = domain.DRIVE_TRUCK if truckish else domain.FLY_AIRPLANE
    return GroundEvent(kind, vehicle, origin=locations[0], dest=locations[1])


def parse_event_line(line: str, tier: str,
                     templates: TemplateSet = DEFAULT_TEMPLATES
                     ) -> ParsedEventLine:
    """Parse an event sentence of any template variant.

    The tier family fixes which temporal fields must be present; a sentence
    exposing the wrong fields (or none of the expected ones) raises
    :class:`TemplateParseError` with a diagnostic.
    """
    del templates  # parsing is shape-based and covers every template
    family = tier_family(tier)
    text = line.strip()
    if not text:
        raise TemplateParseError("empty event line")
    event = _parse_event_core(text, what="event line")

    clocks = _CLOCK_SCAN.findall(text)
    dur_m = _DURATION_SCAN.search(text)
    expected = {"easy": "two clock readings and no duration",
                "medium": "one clock reading and a duration",
                "hard": "a duration and no clock readings"}[family]

    def bad(found: str) -> TemplateParseError:
        return TemplateParseError(
            f"{family} event line must show {expected}, found {found}: "
            f"{line!r}"
        )

    if family == "easy":
        if len(clocks) != 2 or dur_m:
            raise bad(f"{len(clocks)} clock(s)"
                      + (", a duration" if dur_m else ""))
        return ParsedEventLine(event, canonical_clock(clocks[0]),
                               canonical_clock(clocks[1]))
    if family == "medium":
        if len(clocks) != 1 or not dur_m:
            raise bad(f"{len(clocks)} clock(s)"
                      + ("" if dur_m else ", no duration"))
        return ParsedEventLine(event, canonical_clock(clocks[0]),
                               None, int(dur_m.group(1)))
    if clocks or not dur_m:
        raise bad(f"{len(clocks)} clock(s)"
                  + ("" if dur_m else ", no duration"))
    return ParsedEventLine(event, None, None, int(dur_m.group(1)))


# --- scenario prose ---------------------------------------------------------

SERIAL_DOMAIN_TEXT = (
    "Loading a package in a truck is possible if the package and the truck "
    "are in the same location. During the loading truck event, the package "
    "location can be either at the loading location or inside the truck. "
    "Loading a package in an airplane is possible if the package and the "
    "airplane are in the same location. During the loading airplane event, "
    "the package location can be either at the loading location or inside "
    "the airplane. Unloading a package from a truck is possible if the "
    "package and the truck are in the same location. During the unloading "
    "truck event, the package location can be either at the unloading "
    "location or inside the truck. Unloading a package from an airplane is "
    "possible if the package and the airplane are in the same location. "
    "During the unloading airplane event, the package location can be "
    "either at the unloading location or inside the airplane. Driving a "
    "truck is possible only if the source and destination locations are in "
    "the same city. During the driving event, the package location is in "
    "the truck. Flying an airplane is possible only if the source and "
    "destination locations are in different cities. During the flying "
    "event, the package location is in the airplane. Loading and unloading "
    "events for any trucks or airplanes, are performed one package at a "
    "time. If any event is delayed or expedited, all subsequent events are "
    "also delayed or expedited accordingly."
)

PARALLEL_DOMAIN_TEXT = (
    "Loading a package in a truck is possible if the package and the truck "
    "are in the same location. During the loading truck event, the package "
    "location can be either at the loading location or inside the truck. "
    "Loading a package in an airplane is possible if the package and the "
    "airplane are in the same location. During the loading airplane event, "
    "the package location can be either at the loading location or inside "
    "the airplane. Unloading a package from a truck is possible if the "
    "package and the truck are in the same location. During the unloading "
    "truck event, the package location can be either at the unloading "
    "location or inside the truck. Unloading a package from an airplane is "
    "possible if the package and the airplane are in the same location. "
    "During the unloading airplane event, the package location can be "
    "either at the unloading location or inside the airplane. Driving a "
    "truck is possible only if the source and destination locations are in "
    "the same city. During the driving event, the package location is in "
    "the truck. Flying an airplane is possible only if the source and "
    "destination locations are in different cities. During the flying "
    "event, the package location is in the airplane. Multiple packages can "
    "be loaded onto or unloaded from a truck simultaneously, but loading "
    "and unloading cannot occur at the same time. Similarly, multiple "
    "packages can be loaded or unloaded simultaneously from an airplane, "
    "but simultaneous loading and unloading are not permitted. When a "
    "truck reaches a new location, unloading of packages must occur before "
    "loading new packages. When an airplane arrives at a new location, "
    "unloading of packages must occur before loading new packages. If any "
    "event is delayed or expedited, all subsequent dependent events are "
    "also delayed or expedited accordingly."
)

EVENTS_HEADER = "Given the initial states, the following events occur:"


def _listing(items: list[str]) -> str:
    if len(items) == 1:
        return items[0]
    if len(items) == 2:
        return f"{items[0]} and {items[1]}"
    return ", ".join(items[:-1]) + f", and {items[-1]}"


@dataclass(frozen=True)
class ScenarioText:
    """The four narration sections shared by every question over one
    (scenario, schedule) pair."""

    domain_text: str
    objects_text: str
    init_text: str
    events_text: str

    def sections(self) -> tuple[str, str, str, str]:
        return (self.domain_text, self.objects_text, self.init_text,
                self.events_text)


def render_objects_text(scenario: Scenario) -> str:
    """Inventory prose; listing order is shuffled per scenario (airports
    always close their city's location list)."""
    w = scenario.world
    rng = rng_for("prose", scenario.scenario_id)

    cities = list(w.cities)
    rng.shuffle(cities)
    plain = [l for l in w.locations if l not in w.airports]
    airports = [l for l in w.locations if l in w.airports]
    rng.shuffle(plain)
    rng.shuffle(airports)
    airplanes = list(w.airplanes)
    rng.shuffle(airplanes)
    trucks = list(w.trucks)
    rng.shuffle(trucks)
    packages = list(w.packages)
    rng.shuffle(packages)

    parts = [
        f"there are {len(cities)} cities, {_listing(cities)}.",
        f"there are {len(w.locations)} locations, "
        f"{_listing(plain + airports)}.",
    ]
    for city in cities:
        locs = ([l for l in plain if w.city_of[l] == city]
                + [l for l in airports if w.city_of[l] == city])
        if len(locs) == 1:
            parts.append(f"location {locs[0]} is in city {city}.")
        else:
            parts.append(f"locations {_listing(locs)} are in city {city}.")
    parts.append(f"there are {len(airports)} airports, The location of the "
                 f"airports are {_listing(airports)}.")
    parts.append(f"there are {len(airplanes)} airplanes, "
                 f"{_listing(airplanes)}.")
    parts.append(f"there are {len(trucks)} trucks, {_listing(trucks)}.")
    parts.append(f"there are {len(packages)} packages, "
                 f"{_listing(packages)}.")
    return " ".join(parts)


_KIND_WORD = {"t": "truck", "a": "airplane", "p": "package"}


def render_init_text(scenario: Scenario) -> str:
    """Initial position prose, one sentence per movable entity."""
    w = scenario.world
    rng = rng_for("prose-init", scenario.scenario_id)
    order = list(w.movables)
    rng.shuffle(order)
    sentences = []
    for e in order:
        word = _KIND_WORD[e[0]]
        sentences.append(
            f"{word} {e} is at the location {scenario.init.position[e]}."
        )
    return " ".join(sentences)


def render_scenario_text(scenario: Scenario, schedule: TimedSchedule,
                         tier: str, *, seed: int = 0,
                         templates: TemplateSet = DEFAULT_TEMPLATES
                         ) -> ScenarioText:
    """All four narration sections for one scheduled scenario.

    Template variants are drawn per event from ``seed``; the same seed
    always yields the same narration.  The domain paragraph follows the
    schedule mode, not the tier name, so serial and parallel narrations
    state the timing rules actually in force.
    """
    rng = rng_for("lines", seed)
    lines = [
        render_event_line(te, tier, origin_clock=schedule.origin_clock,
                          variant=rng.randrange(N_VARIANTS),
                          templates=templates)
        for te in schedule.events
    ]
    domain_text = (PARALLEL_DOMAIN_TEXT if schedule.mode == PARALLEL
                   else SERIAL_DOMAIN_TEXT)
    return ScenarioText(
        domain_text=domain_text,
        objects_text=render_objects_text(scenario),
        init_text=render_init_text(scenario),
        events_text=EVENTS_HEADER + "\n" + " ".join(lines),
    )


# --- question text ----------------------------------------------------------

def gerund_clause(ev: GroundEvent) -> str:
    """An event as a noun phrase, e.g. ``loading package p5 into airplane
    a0 at location l1_0`` — used in hypothetical and anchoring clauses."""
    if domain.is_transfer(ev.kind):
        s = _transfer_slots(ev)
        return (f"{s['gerund']} package {s['p']} {s['prep']} "
                f"{s['vkind']} {s['v']} at location {s['l']}")
    if ev.kind == domain.DRIVE_TRUCK:
        return (f"driving truck {ev.vehicle} from location {ev.origin} "
                f"to location {ev.dest}")
    return (f"flying airplane {ev.vehicle} from location {ev.origin} "
            f"to location {ev.dest}")


def _hours_phrase(offset_hours: int) -> str:
    n = abs(offset_hours)
    unit = "hour" if n == 1 else "hours"
    direction = "after" if offset_hours > 0 else "before"
    return f"{n} {unit} {direction}"


def render_question_text(plan, *, package: str, query_clock: str,
                         offset_hours: int = 0,
                         perturbation_target: int | None = None,
                         perturbation_kind: str | None = None,
                         perturbation_minutes: int | None = None,
                         anchor_index: int | None = None,
                         anchor_clock: str | None = None) -> str:
    """Compose the question sentence.

    Conditions (anchor first, then the hypothetical change) are joined with
    "and" and close with a comma before the lowercase query; an
    unconditional question starts with a capitalized "Where".
    """
    if offset_hours == 0:
        query = f"where is the package {package} at {query_clock}?"
    else:
        query = (f"where is the package {package} "
                 f"{_hours_phrase(offset_hours)} {query_clock}?")

    conditions = []
    if anchor_index is not None:
        clause = gerund_clause(plan[anchor_index - 1])
        conditions.append(f"{clause} starts at {anchor_clock}")
    if perturbation_target is not None:
        clause = gerund_clause(plan[perturbation_target - 1])
        verb = "delayed" if perturbation_kind == "delay" else "expedited"
        conditions.append(
            f"{clause} is {verb} by {perturbation_minutes} minutes"
        )
    if conditions:
        return f"If {' and '.join(conditions)}, {query}"
    return query[0].upper() + query[1:]


@dataclass(frozen=True)
class ParsedQuestion:
    """Structured form of a question sentence."""

    package: str
    query_clock: str
    offset_hours: int = 0
    perturbation_clause: GroundEvent | None = None
    perturbation_kind: str | None = None
    perturbation_minutes: int | None = None
    anchor_clause: GroundEvent | None = None
    anchor_clock: str | None = None


_QUERY_RE = re.compile(
    r"\b[Ww]here is the (?:package|product) (p\d+)\b"
)
_RELATIVE_RE = re.compile(
    rf"(\d+)\s+hours?\s+(before|after)\s+({CLOCK_PATTERN})"
)
_STATIC_RE = re.compile(rf"\bat\s+({CLOCK_PATTERN})")
_PERTURB_RE = re.compile(r"\bis\s+(delayed|expedited)\s+by\s+(\d+)\s+minutes?")
_ANCHOR_RE = re.compile(rf"\bstarts\s+at\s+({CLOCK_PATTERN})")


def parse_question_text(text: str) -> ParsedQuestion:
    """Parse a question sentence, tolerating light wording drift.

    Tolerates "product" for "package", a capitalized mid-sentence "Where",
    and a missing comma before the query.
    """
    text = text.strip()
    qm = _QUERY_RE.search(text)
    if not qm:
        raise QuestionParseError(f"no package query found in {text!r}")
    package = qm.group(1)
    tail = text[qm.end():]

    rel = _RELATIVE_RE.search(tail)
    if rel:
        n, direction, clock = rel.groups()
        offset = int(n) if direction == "after" else -int(n)
        query_clock = canonical_clock(clock)
    else:
        st = _STATIC_RE.search(tail)
        if not st:
            raise QuestionParseError(f"no query clock found in {text!r}")
        offset = 0
        query_clock = canonical_clock(st.group(1))

    fields: dict[str, object] = {}
    head = text[:qm.start()].strip()
    if head:
        if not head.startswith("If "):
            raise QuestionParseError(
                f"conditions must start with 'If': {text!r}"
            )
        for fragment in head[3:].rstrip(", ").split(" and "):
            pm = _PERTURB_RE.search(fragment)
            am = _ANCHOR_RE.search(fragment)
            if pm:
                clause = fragment[:pm.start()].strip()
                fields["perturbation_clause"] = _parse_event_core(
                    clause, what="hypothetical clause")
                fields["perturbation_kind"] = (
                    "delay" if pm.group(1) == "delayed" else "expedite")
                fields["perturbation_minutes"] = int(pm.group(2))
            elif am:
                clause = fragment[:am.start()].strip()
                fields["anchor_clause"] = _parse_event_core(
                    clause, what="anchoring clause")
                fields["anchor_clock"] = canonical_clock(am.group(1))
            else:
                raise QuestionParseError(
                    f"unrecognized condition {fragment!r} in {text!r}"
                )
    return ParsedQuestion(package, query_clock, offset, **fields)


def match_clause_index(plan, clause: GroundEvent) -> int:
    """First 1-based plan index whose event matches a question clause."""
    for i, ev in enumerate(plan, start=1):
        if ev == clause:
            return i
    raise QuestionParseError(
        f"no plan event matches clause {domain.describe_event(clause)}"
    )


# --- prompt assembly --------------------------------------------------------

REASONING_FOOTER = (
    "Let's think step-by-step to answer the question. "
    "Please use the below format:\n"
    "Reasoning steps: [generate step-by-step reasoning]\n"
    "Answer: [final answer]"
)

ZERO_SHOT = "zero"
FEW_SHOT = "few"


@dataclass(frozen=True)
class Exemplar:
    """A solved sample shown before the question in few-shot prompts."""

    sections: ScenarioText
    question: str
    answers: tuple[str, ...]


def assemble_prompt(sections: ScenarioText, question: str,
                    mode: str = ZERO_SHOT,
                    exemplars: tuple[Exemplar, ...] = ()) -> str:
    """Concatenate narration sections, question, and reasoning footer.

    Few-shot prompts carry exactly two exemplars, each ending with its gold
    answer line.  An exemplar that repeats the evaluated sample's events
    and question (or a duplicated exemplar) raises
    :class:`ContaminationError`.
    """
    if mode == ZERO_SHOT:
        if exemplars:
            raise ValueError("zero-shot prompts take no exemplars")
        blocks = [*sections.sections(), question, REASONING_FOOTER]
        return "\n\n".join(blocks)
    if mode != FEW_SHOT:
        raise ValueError(f"unknown prompt mode {mode!r}")
    if len(exemplars) != 2:
        raise ValueError(f"few-shot prompts take exactly 2 exemplars, "
                         f"got {len(exemplars)}")
    target_key = (sections.events_text, question)
    seen = {target_key}
    blocks: list[str] = []
    for ex in exemplars:
        key = (ex.sections.events_text, ex.question)
        if key in seen:
            raise ContaminationError(
                "few-shot exemplar repeats the evaluated sample "
                f"(question {ex.question!r})"
            )
        seen.add(key)
        blocks.extend(ex.sections.sections())
        blocks.append(ex.question)
        blocks.append(f"Answer: {json.dumps(list(ex.answers))}")
    blocks.extend(sections.sections())
    blocks.append(question)
    blocks.append(REASONING_FOOTER)
    return "\n\n".join(blocks)


__all__ = [
    "format_clock", "parse_clock", "canonical_clock", "CLOCK_PATTERN",
    "TemplateSet", "DEFAULT_TEMPLATES", "N_VARIANTS", "tier_family",
    "render_event_line", "ParsedEventLine", "parse_event_line",
    "SERIAL_DOMAIN_TEXT", "PARALLEL_DOMAIN_TEXT", "EVENTS_HEADER",
    "ScenarioText", "render_objects_text", "render_init_text",
    "render_scenario_text", "gerund_clause", "render_question_text",
    "ParsedQuestion", "parse_question_text", "match_clause_index",
    "REASONING_FOOTER", "ZERO_SHOT", "FEW_SHOT", "Exemplar",
    "assemble_prompt",
]
