import math

import pytest

from mapfr.model import (EPS_T, Agent, Constraint, Instance, ModelError, MotionEvent, Solution, TemporalPlan,
                         check_plan, makespan, merge_waits, plan_position, unit_square_instance)


def plan(aid, *evs):
    return TemporalPlan(aid, tuple(MotionEvent(aid, *e) for e in evs))


def test_agent_rejects_bad_radius_and_speed():
    with pytest.raises(ModelError):
        Agent(1, 0.0, 1.0)
    with pytest.raises(ModelError):
        Agent(1, 0.2, -1.0)
    with pytest.raises(ModelError):
        Agent(1, float("nan"), 1.0)


def test_instance_validation():
    pos = {1: (0, 0), 2: (1, 0)}
    a = [Agent(1, 0.2, 1.0), Agent(2, 0.2, 1.0)]
    with pytest.raises(ModelError):
        Instance.build(pos, [(1, 1)], a, {1: 1, 2: 2}, {1: 2, 2: 1})
    with pytest.raises(ModelError):
        Instance.build(pos, [(1, 3)], a, {1: 1, 2: 2}, {1: 2, 2: 1})
    with pytest.raises(ModelError):
        Instance.build(pos, [(1, 2)], a, {1: 1, 2: 1}, {1: 2, 2: 1})
    with pytest.raises(ModelError):
        Instance.build({1: (0, 0), 2: (0, 0)}, [(1, 2)], a, {1: 1, 2: 2}, {1: 2, 2: 1})
    with pytest.raises(ModelError):
        Instance.build(pos, [(1, 2)], a, {1: 1}, {1: 2, 2: 1})


def test_unit_square_geometry(square):
    assert square.neighbors(1) == (2, 3, 4)
    assert math.isclose(square.dist(1, 4), math.sqrt(2))
    assert square.has_edge(2, 3) and square.has_edge(3, 2)
    assert square.duration(1, 1, 2) == 1.0


def test_check_plan_accepts_and_reports(square):
    d = math.sqrt(2)
    assert check_plan(plan(1, (1, 4, 0.0, d)), square) is None
    assert check_plan(plan(1, (1, 1, 0.0, 0.5), (1, 4, 0.5, 0.5 + d)), square) is None
    assert "start at t=0" in check_plan(plan(1, (1, 4, 0.1, 0.1 + d)), square)
    assert "goal" in check_plan(plan(1, (1, 2, 0.0, 1.0)), square)
    assert "duration mismatch" in check_plan(plan(1, (1, 4, 0.0, 1.0)), square)
    assert "chain break" in check_plan(plan(1, (1, 2, 0.0, 1.0), (2, 4, 1.5, 2.5)), square)
    assert "empty plan" in check_plan(TemporalPlan(1, ()), square)
    assert "non-positive" in check_plan(plan(1, (1, 1, 0.0, 0.0), (1, 4, 0.0, d)), square)
    # within the time tolerance a chain still connects
    assert check_plan(plan(1, (1, 2, 0.0, 1.0), (2, 4, 1.0 + EPS_T / 2, 2.0 + EPS_T / 2)), square) is None


def test_plan_position_parks_at_both_ends(square):
    p = plan(1, (1, 1, 0.0, 0.5), (1, 4, 0.5, 0.5 + math.sqrt(2)))
    assert plan_position(p, square, -1.0) == (0.0, 0.0)
    assert plan_position(p, square, 0.3) == (0.0, 0.0)
    x, y = plan_position(p, square, 0.5 + math.sqrt(2) / 2)
    assert math.isclose(x, 0.5) and math.isclose(y, 0.5)
    assert plan_position(p, square, 100.0) == (1.0, 1.0)


def test_makespan_and_empty_plan():
    sol = Solution((plan(1, (1, 2, 0.0, 1.0)), TemporalPlan(2, ())))
    assert makespan(sol) == 1.0
    with pytest.raises(ModelError):
        makespan(Solution(()))


def test_merge_waits():
    evs = [MotionEvent(1, 1, 1, 0, 1), MotionEvent(1, 1, 1, 1, 2), MotionEvent(1, 1, 2, 2, 3),
           MotionEvent(1, 2, 2, 3, 4)]
    out = merge_waits(evs)
    assert out == (MotionEvent(1, 1, 1, 0, 2), MotionEvent(1, 1, 2, 2, 3), MotionEvent(1, 2, 2, 3, 4))


def test_constraint_interval_is_half_open():
    c = Constraint(1, 1, 2, 0.5, 1.0)
    assert c.contains(0.5) and not c.contains(1.0)
    assert not c.is_vertex and Constraint(1, 3, 3, 0, 1).is_vertex
    with pytest.raises(ModelError):
        Constraint(1, 1, 2, 1.0, 1.0)
