"""Question sampling: depths, anchors, and the three question types.

Every question targets a *depth*: the number of plan events that have
started by the queried minute, counted from an anchor event.  The anchor
is plan event 1 for tiers whose narration carries clock readings, and the
queried package's first linked event for duration-only tiers (whose
questions must state the anchor's start clock explicitly).

Question types:

* static — "where is p at T?" with T uniform over the depth window;
* relative — "where is p N hours before/after T?" with the resolved
  minute in the depth window and the stated reference inside the span;
* hypothetical — one event's duration is delayed or expedited and the
  question is asked (and answered) on the perturbed schedule; the target
  event must have started by the queried minute.

Draws are deterministic in the seed.  When no admissible query exists for
the requested depth the sampler raises :class:`SamplingMissError` and the
caller retries with its next derived seed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DepthError, SamplingMissError, SpanError
from .planning import Scenario
from .rendering import format_clock, render_question_text
from .scheduling import (DELAY, EXPEDITE, PERTURBATION_RANGE, Perturbation,
                         TimedSchedule, apply_perturbation)
from .seeds import rng_for
from .tracking import (AnswerSet, build_timeline, linked_event_indices,
                       locate_at, resolve_clock)

EASY = "easy"
MEDIUM = "medium"
HARD_SERIAL = "hard_serial"
HARD_PARALLEL = "hard_parallel"
TIERS = (EASY, MEDIUM, HARD_SERIAL, HARD_PARALLEL)
CLOCKED_TIERS = (EASY, MEDIUM)

STATIC = "static"
RELATIVE = "relative"
HYPOTHETICAL = "hypothetical"
QTYPES = (STATIC, RELATIVE, HYPOTHETICAL)

DEPTH_RANGE = (6, 20)
OFFSET_HOURS_RANGE = (1, 4)


@dataclass(frozen=True)
class Question:
    """A sampled question with its ground truth.

    ``query_clock`` is the clock reading printed in the question; for
    relative questions the asked-about minute is that reading shifted by
    ``offset_hours`` (positive = after).  ``query_minute`` is the resolved
    relative minute on the effective (possibly perturbed) schedule.
    """

    tier: str
    qtype: str
    package: str
    depth: int
    query_clock: str
    query_minute: int
    gold: AnswerSet
    offset_hours: int = 0
    perturbation: Perturbation | None = None
    anchor_index: int | None = None
    anchor_clock: str | None = None


def anchor_index_for(scenario: Scenario, tier: str, package: str) -> int:
    """Plan index the depth count starts from."""
    if tier in CLOCKED_TIERS:
        return 1
    linked = linked_event_indices(scenario, package)
    if not linked:
        raise DepthError(f"package {package} is linked to no events")
    return linked[0]


def compute_depth(schedule: TimedSchedule, anchor_index: int,
                  minute: int) -> int:
    """Highest plan index started by ``minute``, counted from the anchor.

    Raises :class:`DepthError` when the minute precedes the anchor
    event's start (the sampler never emits such queries).
    """
    if minute < schedule[anchor_index].start:
        raise DepthError(
            f"minute {minute} precedes anchor event {anchor_index} "
            f"(starts at {schedule[anchor_index].start})"
        )
    started = max(te.index for te in schedule.events if te.start <= minute)
    return started - anchor_index


def depth_window(schedule: TimedSchedule, anchor_index: int,
                 depth: int) -> tuple[int, int] | None:
    """Inclusive minute range where :func:`compute_depth` equals ``depth``,
    or None when the combination is unreachable."""
    target = anchor_index + depth
    n = len(schedule.events)
    if target < anchor_index or target > n:
        return None
    lo = max(schedule[target].start, schedule[anchor_index].start)
    later_starts = [schedule[j].start for j in range(target + 1, n + 1)]
    hi = min(later_starts) - 1 if later_starts else schedule.span_end
    hi = min(hi, schedule.span_end)
    if lo > hi:
        return None
    return lo, hi


def gold_answer(scenario: Scenario, schedule: TimedSchedule,
                question: Question) -> AnswerSet:
    """Recompute a question's answer from scratch on the base schedule."""
    effective = schedule
    if question.perturbation is not None:
        effective = apply_perturbation(schedule, question.perturbation)
    minute = resolve_clock(effective, question.query_clock)
    minute += 60 * question.offset_hours
    timeline = build_timeline(scenario, effective, question.package)
    return locate_at(timeline, minute)


def question_text(question: Question, scenario: Scenario) -> str:
    """Render a question's sentence."""
    p = question.perturbation
    return render_question_text(
        scenario.plan,
        package=question.package,
        query_clock=question.query_clock,
        offset_hours=question.offset_hours,
        perturbation_target=p.target if p else None,
        perturbation_kind=p.kind if p else None,
        perturbation_minutes=p.minutes if p else None,
        anchor_index=question.anchor_index,
        anchor_clock=question.anchor_clock,
    )


def _finish(scenario: Scenario, base: TimedSchedule,
            effective: TimedSchedule, tier: str, qtype: str, package: str,
            depth: int, minute: int, offset_hours: int,
            perturbation: Perturbation | None) -> Question:
    anchor_index = anchor_clock = None
    if tier not in CLOCKED_TIERS:
        anchor_index = anchor_index_for(scenario, tier, package)
        anchor_clock = format_clock(
            effective.origin_clock + effective[anchor_index].start)
    reference = minute - 60 * offset_hours
    query_clock = format_clock(effective.origin_clock + reference)
    timeline = build_timeline(scenario, effective, package)
    gold = locate_at(timeline, minute)
    question = Question(
        tier=tier, qtype=qtype, package=package, depth=depth,
        query_clock=query_clock, query_minute=minute, gold=gold,
        offset_hours=offset_hours, perturbation=perturbation,
        anchor_index=anchor_index, anchor_clock=anchor_clock,
    )
    check_anchor = anchor_index if anchor_index is not None else 1
    assert compute_depth(effective, check_anchor, minute) == depth
    return question


def sample_question(scenario: Scenario, schedule: TimedSchedule, tier: str,
                    qtype: str, depth: int, seed: int, *,
                    offset_range: tuple[int, int] = OFFSET_HOURS_RANGE,
                    perturb_range: tuple[int, int] = PERTURBATION_RANGE,
                    max_tries: int = 60) -> Question:
    """Draw one question deterministically from ``seed``.

    Rejection-samples admissible combinations; raises
    :class:`SamplingMissError` after ``max_tries`` failed draws.
    """
    rng = rng_for("question", seed)
    packages = scenario.world.packages
    n = len(schedule.events)

    for _ in range(max_tries):
        package = packages[rng.randrange(len(packages))]
        anchor = (1 if tier in CLOCKED_TIERS
                  else anchor_index_for(scenario, tier, package))

        perturbation = None
        effective = schedule
        if qtype == HYPOTHETICAL:
            target = rng.randint(1, n)
            duration = schedule[target].duration
            lo, hi = perturb_range
            kinds = [DELAY]
            if duration - 1 >= lo:
                kinds.append(EXPEDITE)
            kind = kinds[rng.randrange(len(kinds))]
            cap = hi if kind == DELAY else min(hi, duration - 1)
            minutes = rng.randint(lo, cap)
            perturbation = Perturbation(target, kind, minutes)
            try:
                effective = apply_perturbation(schedule, perturbation)
            except SpanError:
                continue

        window = depth_window(effective, anchor, depth)
        if window is None:
            continue
        minute = rng.randint(*window)
        if perturbation is not None and \
                effective[perturbation.target].start > minute:
            continue

        offset_hours = 0
        if qtype == RELATIVE:
            span_end = effective.span_end
            choices = []
            for h in range(offset_range[0], offset_range[1] + 1):
                if minute - 60 * h >= 0:
                    choices.append(h)       # "h hours after <earlier>"
                if minute + 60 * h <= span_end:
                    choices.append(-h)      # "h hours before <later>"
            if not choices:
                continue
            offset_hours = choices[rng.randrange(len(choices))]

        return _finish(scenario, schedule, effective, tier, qtype, package,
                       depth, minute, offset_hours, perturbation)

    raise SamplingMissError(
        f"no admissible {tier}/{qtype} question at depth {depth} "
        f"after {max_tries} draws (seed {seed})"
    )


__all__ = [
    "EASY", "MEDIUM", "HARD_SERIAL", "HARD_PARALLEL", "TIERS",
    "CLOCKED_TIERS", "STATIC", "RELATIVE", "HYPOTHETICAL", "QTYPES",
    "DEPTH_RANGE", "OFFSET_HOURS_RANGE", "Question", "anchor_index_for",
    "compute_depth", "depth_window", "gold_answer", "question_text",
    "sample_question",
]
