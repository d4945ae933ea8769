from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from unseentimeqa.dataset import make_schedule
from unseentimeqa.errors import DepthError, SamplingMissError
from unseentimeqa.planning import generate_scenario
from unseentimeqa.questions import (DEPTH_RANGE, QTYPES, TIERS,
                                    anchor_index_for, compute_depth,
                                    depth_window, gold_answer,
                                    question_text, sample_question)
from unseentimeqa.rendering import parse_clock, parse_question_text
from unseentimeqa.scheduling import apply_perturbation
from unseentimeqa.tracking import (linked_event_indices, resolve_clock,
                                   simulate_minutes)


def test_anchor_is_narrative_start_for_clocked_tiers(scenarios):
    scn = scenarios[0]
    assert anchor_index_for(scn, "easy", "p0") == 1
    assert anchor_index_for(scn, "medium", "p3") == 1


def test_anchor_is_first_linked_event_for_hard_tiers(scenarios):
    scn = scenarios[0]
    for package in scn.world.packages:
        linked = linked_event_indices(scn, package)
        assert anchor_index_for(scn, "hard_serial", package) == linked[0]
        assert anchor_index_for(scn, "hard_parallel", package) == linked[0]


def test_compute_depth_counts_started_events(scenarios):
    scn = scenarios[0]
    sched = make_schedule(0, "easy", scn, 1)
    assert compute_depth(sched, 1, sched[1].start) == 0
    assert compute_depth(sched, 1, sched[3].start) == 2
    assert compute_depth(sched, 1, sched[3].start - 1) == 1
    last = len(sched.events)
    assert compute_depth(sched, 1, sched.span_end) == last - 1
    with pytest.raises(DepthError):
        anchor = 5
        compute_depth(sched, anchor, sched[anchor].start - 1)


def test_depth_window_is_exactly_the_preimage(scenarios):
    scn = scenarios[0]
    for tier in ("easy", "hard_parallel"):
        sched = make_schedule(0, tier, scn, 1)
        anchor = 1 if tier == "easy" else anchor_index_for(scn, tier, "p0")
        for depth in range(0, len(sched.events) - anchor + 1):
            window = depth_window(sched, anchor, depth)
            if window is None:
                continue
            lo, hi = window
            assert lo <= hi
            assert compute_depth(sched, anchor, lo) == depth
            assert compute_depth(sched, anchor, hi) == depth
            if lo - 1 >= sched[anchor].start:
                assert compute_depth(sched, anchor, lo - 1) != depth
            if hi + 1 <= sched.span_end:
                assert compute_depth(sched, anchor, hi + 1) != depth


def test_depth_window_none_when_out_of_plan(scenarios):
    scn = scenarios[0]
    sched = make_schedule(0, "easy", scn, 1)
    assert depth_window(sched, 1, len(sched.events) + 5) is None


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=3_000))
def test_sampled_questions_verify_and_render(seed):
    scn = generate_scenario(seed % 10)
    tier = TIERS[seed % len(TIERS)]
    qtype = QTYPES[(seed // 4) % len(QTYPES)]
    depth = DEPTH_RANGE[0] + seed % (DEPTH_RANGE[1] - DEPTH_RANGE[0] + 1)
    sched = make_schedule(0, tier, scn, 1 + seed % 3)
    try:
        q = sample_question(scn, sched, tier, qtype, depth, seed)
    except SamplingMissError:
        return
    assert q.depth == depth
    effective = sched
    if q.perturbation is not None:
        effective = apply_perturbation(sched, q.perturbation)
    anchor = anchor_index_for(scn, tier, q.package)
    assert compute_depth(effective, anchor, q.query_minute) == depth
    assert q.gold == simulate_minutes(scn, effective, q.package,
                                      q.query_minute)
    assert gold_answer(scn, sched, q) == q.gold

    # rendered text carries everything needed to reconstruct the query
    text = question_text(q, scn)
    parsed = parse_question_text(text)
    assert parsed.package == q.package
    reference = resolve_clock(effective, parsed.query_clock)
    assert reference + 60 * parsed.offset_hours == q.query_minute


def test_qtype_field_contract(scenarios):
    scn = scenarios[0]
    for tier in TIERS:
        sched = make_schedule(0, tier, scn, 1)
        hard = tier.startswith("hard")
        for qtype, depth in (("static", 8), ("relative", 9),
                             ("hypothetical", 10)):
            for seed in range(40):
                try:
                    q = sample_question(scn, sched, tier, qtype, depth,
                                        seed)
                    break
                except SamplingMissError:
                    continue
            else:
                pytest.fail(f"no {tier}/{qtype} sample found")
            assert (q.anchor_index is not None) == hard
            assert (q.anchor_clock is not None) == hard
            if qtype == "static":
                assert q.offset_hours == 0 and q.perturbation is None
            elif qtype == "relative":
                assert q.offset_hours != 0 and q.perturbation is None
            else:
                assert q.offset_hours == 0 and q.perturbation is not None


def test_relative_offsets_span_both_directions(scenarios):
    scn = scenarios[0]
    sched = make_schedule(0, "easy", scn, 1)
    signs = set()
    for seed in range(200):
        try:
            q = sample_question(scn, sched, "easy", "relative", 12, seed)
        except SamplingMissError:
            continue
        signs.add(1 if q.offset_hours > 0 else -1)
        assert 1 <= abs(q.offset_hours) <= 4
    assert signs == {1, -1}


def test_hypothetical_targets_precede_query(scenarios):
    scn = scenarios[0]
    sched = make_schedule(0, "medium", scn, 1)
    for seed in range(60):
        try:
            q = sample_question(scn, sched, "medium", "hypothetical", 14,
                                seed)
        except SamplingMissError:
            continue
        effective = apply_perturbation(sched, q.perturbation)
        assert effective[q.perturbation.target].start <= q.query_minute


def test_unreachable_depth_raises_sampling_miss(scenarios):
    scn = scenarios[0]
    sched = make_schedule(0, "easy", scn, 1)
    with pytest.raises(SamplingMissError):
        sample_question(scn, sched, "easy", "static",
                        len(sched.events) + 3, 0)
