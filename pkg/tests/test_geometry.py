import math

from hypothesis import given, settings
from hypothesis import strategies as st

from mapfr.geometry import (Interval, collide, constraints_for, events_collide, first_collision, resolve_collision,
                            segment_of, unsafe_interval, unsafe_interval_bisect, validate_plans)
from mapfr.model import Agent, Collision, Instance, MotionEvent, Solution, TemporalPlan, unit_square_instance

coord = st.floats(-3, 3, allow_nan=False)
times = st.floats(0, 3, allow_nan=False)
SQRT2 = math.sqrt(2)


def sampled_min_gap(si, sj, rr, step=1e-3):
    lo, hi = max(si.t_a, sj.t_a), min(si.t_b, sj.t_b)
    best, t = math.inf, lo
    while t < hi:
        (x1, y1), (x2, y2) = si.at(t), sj.at(t)
        best = min(best, math.hypot(x1 - x2, y1 - y2) - rr)
        t += step
    return best


@settings(max_examples=150, deadline=None)
@given(coord, coord, coord, coord, coord, coord, coord, coord, times, times, st.floats(0.2, 2), st.floats(0.2, 2),
       st.floats(0.05, 0.5), st.floats(0.05, 0.5))
def test_collide_matches_sampling(x1, y1, x2, y2, x3, y3, x4, y4, ta, tb, da, db, ra, rb):
    inst = Instance.build({1: (x1, y1), 2: (x2, y2), 3: (x3, y3), 4: (x4, y4)}, [], [Agent(1, ra, 1), Agent(2, rb, 1)],
                          {1: 1, 2: 3}, {1: 2, 2: 4})
    ea = MotionEvent(1, 1, 2, ta, ta + da)
    eb = MotionEvent(2, 3, 4, tb, tb + db)
    si, sj = segment_of(ea, inst), segment_of(eb, inst)
    got = events_collide(ea, eb, inst)
    if got is not None:
        assert got == collide(si, ra, sj, rb)
    gap = sampled_min_gap(si, sj, ra + rb)
    if gap < -1e-2:
        assert got is not None
    if got is None:
        assert gap > -1e-2
    else:
        assert max(ta, tb) - 1e-9 <= got <= min(ta + da, tb + db) + 1e-9
        (px, py), (qx, qy) = si.at(got + 1e-7), sj.at(got + 1e-7)
        assert math.hypot(px - qx, py - qy) <= ra + rb + 1e-5


def test_touching_is_legal():
    inst = Instance.build({1: (0, 0), 2: (0, 1), 3: (0.4, 0), 4: (0.4, 1)}, [(1, 2), (3, 4)],
                          [Agent(1, 0.2, 1), Agent(2, 0.2, 1)], {1: 1, 2: 3}, {1: 2, 2: 4})
    a, b = MotionEvent(1, 1, 2, 0, 1), MotionEvent(2, 3, 4, 0, 1)
    assert events_collide(a, b, inst) is None
    sol = Solution((TemporalPlan(1, (a,)), TemporalPlan(2, (b,))))
    assert validate_plans(sol, inst) == []


def test_unit_square_collides_and_closed_form():
    for r in (0.1, 0.2, 0.3):
        inst = unit_square_instance(radius=r)
        a, b = MotionEvent(1, 1, 4, 0, SQRT2), MotionEvent(2, 2, 3, 0, SQRT2)
        sol = Solution((TemporalPlan(1, (a,)), TemporalPlan(2, (b,))))
        (c,) = validate_plans(sol, inst)
        iv = unsafe_interval(a, b, inst)
        assert abs(iv.hi - 2 * SQRT2 * r) < 1e-5
        assert abs(iv.lo + 2 * SQRT2 * r) < 1e-5 or iv.lo == 0.0
        ref = unsafe_interval_bisect(a, b, inst)
        assert abs(ref.hi - iv.hi) < 1e-6
        lo_i, lo_j = resolve_collision(c, inst)
        assert lo_i.contains(0.0) and lo_j.contains(0.0)


def test_unsafe_interval_endpoint_is_safe():
    inst = unit_square_instance()
    a, b = MotionEvent(1, 1, 4, 0, SQRT2), MotionEvent(2, 2, 3, 0, SQRT2)
    iv = unsafe_interval(a, b, inst)
    moved = MotionEvent(1, 1, 4, iv.hi, iv.hi + SQRT2)
    assert events_collide(moved, b, inst) is None
    early = MotionEvent(1, 1, 4, iv.hi - 1e-4, iv.hi - 1e-4 + SQRT2)
    assert events_collide(early, b, inst) is not None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5), st.floats(0, 1.5), st.floats(0.15, 0.35))
def test_unsafe_interval_matches_start_sampling(i, j, tb, r):
    # unit-square moves against each other, checked by sampling start offsets
    inst = unit_square_instance(radius=r)
    moves = [(1, 4), (2, 3), (1, 2), (3, 4), (4, 1), (3, 2)]
    u, v = moves[i]
    p, q = moves[j]
    fixed = MotionEvent(2, p, q, tb, tb + inst.dist(p, q))
    d = inst.dist(u, v)
    iv = unsafe_interval(MotionEvent(1, u, v, 0.0, d), fixed, inst)
    for k in range(0, 400):
        s = k * 0.01
        hit = events_collide(MotionEvent(1, u, v, s, s + d), fixed, inst) is not None
        inside = iv is not None and iv.contains(s)
        if hit:
            assert inside, (s, iv)
        elif inside:
            # only boundary slack is allowed
            assert min(abs(s - iv.lo), abs(s - iv.hi)) < 1e-6 or s < 0


def test_wait_side_gives_vertex_window():
    inst = unit_square_instance()
    wait = MotionEvent(1, 1, 1, 0, 1.0)
    mover = MotionEvent(2, 2, 1, 0, 1.0)  # slides onto the waiting disc, contact at distance 0.4
    iv = unsafe_interval(wait, mover, inst)
    assert iv is not None and abs(iv.lo - 0.6) < 1e-6 and iv.hi == 1.0
    assert unsafe_interval(wait, MotionEvent(2, 2, 3, 0, SQRT2), inst) is None
    c = Collision(wait, mover, events_collide(wait, mover, inst))
    ci, cj = constraints_for(c, resolve_collision(c, inst))
    assert ci.is_vertex and ci.frm == 1 and not cj.is_vertex


def test_parking_is_checked():
    inst = Instance.build({1: (0, 0), 2: (1, 0), 3: (2, 0)}, [(1, 2), (2, 3)],
                          [Agent(1, 0.2, 1), Agent(2, 0.2, 1)], {1: 1, 2: 3}, {1: 2, 2: 1})
    p1 = TemporalPlan(1, (MotionEvent(1, 1, 2, 0, 1),))
    p2 = TemporalPlan(2, (MotionEvent(2, 3, 3, 0, 3), MotionEvent(2, 3, 2, 3, 4), MotionEvent(2, 2, 1, 4, 5)))
    c = first_collision(p1, p2, inst)
    assert c is not None and c.event_i.t_end == math.inf


def test_interval_half_open():
    iv = Interval(0.0, 1.0)
    assert iv.contains(0.0) and not iv.contains(1.0)
