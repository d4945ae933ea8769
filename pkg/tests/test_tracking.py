from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from unseentimeqa.domain import is_load, is_movement, is_unload
from unseentimeqa.errors import (ClockParseError, ClockResolutionError,
                                 TimelineRangeError)
from unseentimeqa.planning import generate_scenario
from unseentimeqa.rendering import format_clock
from unseentimeqa.scheduling import (CLOCK_UNIQUE_SPAN, assign_durations,
                                     schedule_parallel, schedule_serial)
from unseentimeqa.tracking import (AnswerSet, build_timeline,
                                   linked_event_indices, locate_at,
                                   resolve_clock, simulate_minutes)


def _schedules(scn, seed):
    for s in range(seed, seed + 1000):
        durations = assign_durations(scn.plan, s)
        try:
            yield schedule_serial(scn.plan, durations, seed=s,
                                  span_cap=CLOCK_UNIQUE_SPAN)
            yield schedule_parallel(scn.plan, durations,
                                    span_cap=CLOCK_UNIQUE_SPAN)
            return
        except Exception:
            continue


def test_answer_set_shape_rules():
    with pytest.raises(AssertionError):
        AnswerSet()
    both = AnswerSet(location="l0_0", vehicle="t0")
    assert both.as_tuple() == ("l0_0", "t0")  # location always first
    assert "t0" in both and "l0_0" in both and "a0" not in both
    assert AnswerSet(vehicle="a1").as_tuple() == ("a1",)


def test_linked_events_cover_load_ride_unload(scenarios):
    scn = scenarios[0]
    for package in scn.world.packages:
        linked = linked_event_indices(scn, package)
        kinds = [scn.plan[i - 1].kind for i in linked]
        assert kinds, f"{package} never appears in the plan"
        assert is_load(kinds[0]), "a package's first event is a pickup"
        assert is_unload(kinds[-1]), "a package's last event is a dropoff"


def test_timeline_tiles_the_whole_span(scenarios):
    scn = scenarios[0]
    for sched in _schedules(scn, 0):
        for package in scn.world.packages:
            tl = build_timeline(scn, sched, package)
            assert tl.segments[0][0] == 0
            for (s1, e1, _), (s2, e2, _) in zip(tl.segments,
                                                tl.segments[1:]):
                assert e1 == s2, "segments must abut"
            assert tl.segments[-1][1] == sched.span_end + 1
            assert tl.span_end == sched.span_end


def test_locate_at_range_errors(scenarios):
    scn = scenarios[0]
    sched = next(_schedules(scn, 0))
    tl = build_timeline(scn, sched, scn.world.packages[0])
    locate_at(tl, 0)
    locate_at(tl, sched.span_end)
    with pytest.raises(TimelineRangeError):
        locate_at(tl, -1)
    with pytest.raises(TimelineRangeError):
        locate_at(tl, sched.span_end + 1)


def test_boundary_minute_belongs_to_later_segment(scenarios):
    """[start, end) windows: at an event's start minute the event's answer
    applies; at its end minute the successor's does."""
    scn = scenarios[0]
    for sched in _schedules(scn, 0):
        for package in scn.world.packages:
            linked = linked_event_indices(scn, package)
            first_load = sched[linked[0]]
            tl = build_timeline(scn, sched, package)
            before = locate_at(tl, first_load.start - 1) \
                if first_load.start > 0 else None
            at = locate_at(tl, first_load.start)
            assert at.vehicle == first_load.event.vehicle
            assert at.location == first_load.event.location
            if before is not None:
                assert before.vehicle is None


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_two_oracles_agree_everywhere(seed):
    scn = generate_scenario(seed % 10)
    for sched in _schedules(scn, seed):
        for package in scn.world.packages:
            tl = build_timeline(scn, sched, package)
            for minute in range(0, sched.span_end + 1,
                                max(1, sched.span_end // 23)):
                assert locate_at(tl, minute) == \
                    simulate_minutes(scn, sched, package, minute)


def test_resolve_clock_unique_and_wrapping(scenarios):
    scn = scenarios[0]
    sched = next(_schedules(scn, 0))
    # relative minute 120 viewed from an origin late in the day wraps
    # past midnight yet must resolve back to 120
    for origin in (0, 700, 1439):
        shifted = type(sched)(sched.mode, origin, sched.events, sched.deps)
        clock = format_clock((origin + 120) % 1440)
        assert resolve_clock(shifted, clock) == 120
    assert sched.span_end < 1439  # ensures an unreachable clock exists
    with pytest.raises(ClockResolutionError):
        # the minute right after span end resolves to no in-span minute
        resolve_clock(sched, format_clock(
            (sched.origin_clock + sched.span_end + 1) % 1440))


def test_resolve_clock_rejects_malformed_text(scenarios):
    sched = next(_schedules(scenarios[0], 0))
    with pytest.raises(ClockParseError):
        resolve_clock(sched, "13:01 PM")
    with pytest.raises(ClockParseError):
        resolve_clock(sched, "8:30")


def test_rider_answers_while_vehicle_moves(scenarios):
    """While its carrier moves, a package answers {vehicle} only; while the
    carrier is parked with the package aboard, {vehicle, location}."""
    scn = scenarios[0]
    sched = next(_schedules(scn, 0))
    found_moving = found_parked = False
    for package in scn.world.packages:
        linked = linked_event_indices(scn, package)
        tl = build_timeline(scn, sched, package)
        for i, j in zip(linked, linked[1:]):
            ev = sched[j]
            if is_movement(ev.event.kind):
                mid = (ev.start + ev.end) // 2
                ans = locate_at(tl, mid)
                assert ans.location is None
                assert ans.vehicle == ev.event.vehicle
                found_moving = True
                if ev.start > sched[i].end:
                    parked = locate_at(tl, sched[i].end)
                    assert parked.vehicle == ev.event.vehicle
                    assert parked.location is not None
                    found_parked = True
    assert found_moving and found_parked
