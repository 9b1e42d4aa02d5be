import math
import random

import pytest

from mapfr.ccbs import ccbs
from mapfr.geometry import validate_plans
from mapfr.generate import corpus
from mapfr.model import Agent, Instance, check_plan
from mapfr.smtcbs import NoSolution, ResourceLimit, SmtCbsConfig, initial_makespan, smt_cbs
from mapfr.rdd import lower_bounds

from conftest import SQRT2


def test_unit_square(square):
    rep = smt_cbs(square)
    assert abs(rep.final_mu - 1.979899) < 1e-5
    assert rep.mu_schedule[0] == pytest.approx(SQRT2)
    assert rep.mu_schedule == sorted(rep.mu_schedule)
    assert validate_plans(rep.solution, square) == []
    waits = [p for p in rep.solution.plans if p.events[0].is_wait]
    assert len(waits) == 1 and abs(waits[0].events[0].t_end - 0.565685) < 1e-5
    assert rep.mutexes >= 1
    for row in rep.log:
        assert len(row.split("\t")) == 5


def test_unit_square_without_generalization(square):
    rep = smt_cbs(square, SmtCbsConfig(generalize=False))
    assert abs(rep.final_mu - 1.979899) < 1e-5


def test_hooks_see_every_model(square):
    models, states = [], []
    smt_cbs(square, on_model=lambda st, sol: models.append((st.mu, sol)), on_state=lambda st, c: states.append(st.mu))
    assert models and states
    for mu, sol in models:
        for p in sol.plans:
            assert check_plan(p, square) is None
            assert p.end_time <= mu + 1e-6


def test_unreachable_goal():
    inst = Instance.build({1: (0, 0), 2: (1, 0), 3: (5, 5)}, [(1, 2)], [Agent(1, 0.2, 1)], {1: 1}, {1: 3})
    with pytest.raises(NoSolution):
        smt_cbs(inst)


def test_time_limit_on_swap():
    inst = Instance.build({1: (0, 0), 2: (1, 0)}, [(1, 2)], [Agent(1, 0.2, 1), Agent(2, 0.2, 1)],
                          {1: 1, 2: 2}, {1: 2, 2: 1})
    with pytest.raises(ResourceLimit):
        smt_cbs(inst, SmtCbsConfig(time_limit=0.5))


def test_mu_ceiling():
    inst = Instance.build({1: (0, 0), 2: (1, 0)}, [(1, 2)], [Agent(1, 0.2, 1), Agent(2, 0.2, 1)],
                          {1: 1, 2: 2}, {1: 2, 2: 1})
    with pytest.raises(ResourceLimit):
        smt_cbs(inst, SmtCbsConfig(mu_ceiling=3.0))


def test_initial_makespan(square):
    assert initial_makespan(square, lower_bounds(square)) == pytest.approx(SQRT2)


def test_euclidean_bounds_same_answer():
    for inst, _ in corpus(5, 6):
        a = smt_cbs(inst).solution.makespan
        b = smt_cbs(inst, SmtCbsConfig(bounds="euclidean")).solution.makespan
        assert abs(a - b) < 1e-6


def test_agrees_with_ccbs_small_corpus():
    for inst, shape in corpus(42, 12, sizes=(4,)):
        s = smt_cbs(inst).solution
        c = ccbs(inst, time_limit=60).solution
        assert validate_plans(s, inst) == [] and validate_plans(c, inst) == []
        assert abs(s.makespan - c.makespan) < 1e-4, shape
