import random

import pytest

from mapfr.encoder import (EncodingError, add_mutex_pairs, augment_basic, encode_basic, event_key,
                           extract_solution)
from mapfr.geometry import validate_plans
from mapfr.model import EPS_T, Constraint, check_plan
from mapfr.rdd import build_rdds, lower_bounds
from mapfr.sat import parse_dimacs, solve_cnf
from mapfr.smtcbs import RddSet

from conftest import SQRT2, grid_instance


def enumerate_models(state, limit=50):
    """Distinct plan sets, blocking each found selection of edge variables."""
    edges = [v for v, k in enumerate(state.varmap.keys) if k is not None and k[0] in "ET"]
    out = []
    while len(out) < limit and state.solve():
        m = state.solver.model
        out.append(extract_solution(state, m))
        state.solver.add_clause([-v if m[v] else v for v in edges])
    return out


def test_unit_square_first_bound_models(square):
    rdds = build_rdds(square, [], SQRT2)
    st = encode_basic(rdds, square)
    assert st.varmap.count("X") == 4 and st.varmap.count("E") == 2 and st.varmap.count("T") == 2
    sols = enumerate_models(st)
    assert len(sols) == 1
    assert len(validate_plans(sols[0], square)) == 1


@pytest.mark.parametrize("seed", range(6))
def test_every_model_is_a_valid_plan_set(seed):
    rng = random.Random(seed)
    vs = rng.sample(range(16), 6)
    inst = grid_instance(4, 3, vs[:3], vs[3:])
    bounds = lower_bounds(inst)
    mu = max(bounds[a][inst.start[a]] for a in inst.agent_ids) + 1.0
    cons = [Constraint(1, inst.start[1], v, 0.0, 0.8) for v in inst.neighbors(inst.start[1])]
    rs = RddSet(inst, mu, bounds, cons)
    st = encode_basic(rs.ordered(), inst, mu=mu)
    sols = enumerate_models(st, 40)
    assert sols
    seen = set()
    for sol in sols:
        key = tuple(sol.plans)
        assert key not in seen
        seen.add(key)
        for p in sol.plans:
            assert check_plan(p, inst) is None
            assert p.end_time <= mu + EPS_T


def test_mutex_excludes_pair(square):
    rdds = build_rdds(square, [Constraint(1, 1, 4, 0, 0.6), Constraint(2, 2, 3, 0, 0.6)], 2.0)
    st = encode_basic(rdds, square, mu=2.0)
    assert st.solve()
    sol = extract_solution(st, st.solver.model)
    e1, e2 = sol.plans[0].events[0], sol.plans[1].events[0]
    k1, k2 = event_key(e1), event_key(e2)
    assert add_mutex_pairs(st, [(k1, k2)]) == 1
    assert add_mutex_pairs(st, [(k2, k1)]) == 0
    for sol in enumerate_models(st):
        keys = {event_key(e) for p in sol.plans for e in p.events}
        assert not {k1, k2} <= keys
    with pytest.raises(EncodingError):
        add_mutex_pairs(st, [(("E", 1, (9, 0), (9, 1)), k2)])


def test_dimacs_stands_alone(square):
    rdds = build_rdds(square, [Constraint(1, 1, 4, 0, 0.6)], 2.0)
    st = encode_basic(rdds, square, mu=2.0)
    st = augment_basic(st, build_rdds(square, [Constraint(1, 1, 4, 0, 0.6), Constraint(2, 2, 3, 0, 0.6)], 2.0))
    n, cl = parse_dimacs(st.dimacs())
    assert solve_cnf(cl, n)[0] == st.solve()
    table = st.var_table().splitlines()
    assert len(table) == st.num_vars


@pytest.mark.parametrize("seed", range(5))
def test_augment_matches_scratch(seed):
    rng = random.Random(100 + seed)
    vs = rng.sample(range(9), 6)
    inst = grid_instance(3, 3, vs[:3], vs[3:])
    bounds = lower_bounds(inst)
    mu = max(bounds[a][inst.start[a]] for a in inst.agent_ids) + 0.5
    cons = []
    reg = {}
    rs = RddSet(inst, mu, bounds, cons, reg)
    st = encode_basic(rs.ordered(), inst, mu=mu)
    for _ in range(8):
        a = rng.choice(inst.agent_ids)
        u = rng.choice(list(inst.positions))
        v = rng.choice(inst.neighbors(u) + (u,))
        lo = rng.uniform(0, mu)
        new = [Constraint(a, u, v, lo, lo + rng.uniform(0.1, 1.0))]
        cons += new
        rs.add(new)
        augment_basic(st, rs.ordered())
        fresh = encode_basic(rs.ordered(), inst, st.mutexes, mu)
        assert st.solve() == fresh.solve()
        if st.solver.model is not None and not st.no_goal:
            sol = extract_solution(st, st.solver.model)
            for p in sol.plans:
                assert check_plan(p, inst) is None
