"""Lazy SAT-based makespan-optimal solver.

For a fixed makespan bound the per-agent RDDs are encoded without any
inter-agent clauses. Each model is decoded and validated in continuous
time; every collision found adds a mutex between the two offending
decisions plus a pair of unsafe-interval constraints that grow the RDDs
with wait decisions. When the formula becomes UNSAT the bound advances to
the next decision time beyond it.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .encoder import EncodingState, add_collision_mutexes, augment_basic, encode_basic, extract_solution
from .geometry import constraints_for, events_collide, resolve_collision, validate_plans
from .model import INF, Collision, Constraint, Instance, MotionEvent, Solution, TemporalPlan, merge_waits
from .rdd import Rdd, build_rdd, lower_bounds, next_makespan

log = logging.getLogger(__name__)


class NoSolution(RuntimeError):
    pass


class ResourceLimit(RuntimeError):
    pass


class InternalError(RuntimeError):
    pass


@dataclass
class SmtCbsConfig:
    mu_ceiling: float = 1e6
    time_limit: Optional[float] = None
    bounds: str = "graph"
    seed: int = 0
    # extend each collision to the other agent's same-shape RDD events (see generalized_collisions)
    generalize: bool = True


@dataclass
class SmtCbsReport:
    solution: Solution
    iterations: int
    mutexes: int
    final_mu: float
    mu_schedule: List[float]
    log: List[str] = field(default_factory=list)


@dataclass
class FixedResult:
    solution: Optional[Solution]
    mu_next: Optional[float]
    iterations: int
    state: Optional[EncodingState]


class RddSet:
    """Per-agent RDDs for one bound, rebuilt only for agents whose constraints changed."""

    def __init__(self, instance: Instance, mu: float, bounds: Dict[int, Dict[int, float]],
                 constraints: Sequence[Constraint] = (), registry: Optional[Dict[int, dict]] = None):
        self.instance, self.mu, self.bounds = instance, mu, bounds
        self.registry = registry if registry is not None else {}
        self.cons: Dict[int, List[Constraint]] = {a: [] for a in instance.agent_ids}
        for c in constraints:
            self.cons[c.agent].append(c)
        self.rdds: Dict[int, Rdd] = {}
        self._events: Dict[int, List[Tuple[tuple, MotionEvent]]] = {}
        for a in instance.agent_ids:
            self._rebuild(a)

    def _rebuild(self, a: int) -> None:
        self.rdds[a] = build_rdd(self.instance, a, self.cons[a], self.mu, self.bounds[a],
                                 self.registry.setdefault(a, {}))
        self._events.pop(a, None)

    def add(self, constraints: Sequence[Constraint]) -> None:
        dirty = set()
        for c in constraints:
            self.cons[c.agent].append(c)
            dirty.add(c.agent)
        for a in sorted(dirty):
            self._rebuild(a)

    def ordered(self) -> List[Rdd]:
        return [self.rdds[a] for a in self.instance.agent_ids]

    def events(self, a: int) -> List[Tuple[tuple, MotionEvent]]:
        """Every timed event the agent's RDD can select: edges and parking at goal nodes."""
        if a not in self._events:
            rdd, goal = self.rdds[a], self.instance.goal[a]
            out = []
            for (fk, tk), e in rdd.edges.items():
                out.append((("E", a, fk, tk), MotionEvent(a, e.frm.vertex, e.to.vertex, e.frm.time, e.to.time)))
            for k, n in rdd.nodes.items():
                if n.vertex == goal:
                    out.append((("T", a, k), MotionEvent(a, goal, goal, n.time, INF)))
            self._events[a] = out
        return self._events[a]


def generalized_collisions(c: Collision, rdds: RddSet) -> List[Collision]:
    """Each offending event of ``c`` against the other agent's RDD events of the same shape.

    Same shape means the same from and to vertices: the same move (or
    wait, or parking) at other times or of other lengths.
    """
    inst = rdds.instance
    out = [c]
    for ev, oev in ((c.event_i, c.event_j), (c.event_j, c.event_i)):
        for _, ev2 in rdds.events(oev.agent):
            if ev2.frm != oev.frm or ev2.to != oev.to or ev2 == oev:
                continue
            t = events_collide(ev, ev2, inst)
            if t is not None:
                out.append(Collision(ev, ev2, t))
    return out


ModelHook = Callable[[EncodingState, Solution], None]
StateHook = Callable[[EncodingState, List[Constraint]], None]


def smt_cbs_fixed(instance: Instance, constraints: List[Constraint], mutexes: dict, mu: float,
                  bounds: Dict[int, Dict[int, float]], log_rows: Optional[List[str]] = None,
                  on_model: Optional[ModelHook] = None, on_state: Optional[StateHook] = None,
                  deadline: Optional[float] = None, seed: int = 0, t0: Optional[float] = None,
                  generalize: bool = True, registry: Optional[Dict[int, dict]] = None) -> FixedResult:
    """One makespan bound. ``constraints`` and ``mutexes`` are extended in place."""
    t0 = time.perf_counter() if t0 is None else t0
    seen = set(constraints)
    rdds = RddSet(instance, mu, bounds, constraints, registry)
    state = encode_basic(rdds.ordered(), instance, mutexes, mu, seed)
    iterations = 0
    while True:
        if on_state is not None:
            on_state(state, list(constraints))
        if state.no_goal:
            if log_rows is not None:
                log_rows.append(_row(mu, state, 0, t0))
            break
        if deadline is not None and time.perf_counter() > deadline:
            raise ResourceLimit("time limit reached")
        iterations += 1
        sat = state.solve()
        if not sat:
            if log_rows is not None:
                log_rows.append(_row(mu, state, 0, t0))
            break
        sol = extract_solution(state, state.solver.model)
        if on_model is not None:
            on_model(state, sol)
        collisions = validate_plans(sol, instance)
        if log_rows is not None:
            log_rows.append(_row(mu, state, len(collisions), t0))
        if not collisions:
            return FixedResult(sol, None, iterations, state)
        if add_collision_mutexes(state, collisions) == 0:
            raise InternalError("collisions repeated without a new mutex")
        if generalize:
            collisions = [g for c in collisions for g in generalized_collisions(c, rdds)]
            add_collision_mutexes(state, collisions)
        _add_constraints(collisions, instance, seen, constraints, rdds)
        augment_basic(state, rdds.ordered())
    try:
        mu_next = next_makespan(state.rdds, mu)
    except ValueError:
        mu_next = None
    return FixedResult(None, mu_next, iterations, state)


def _add_constraints(collisions, instance, seen, constraints, rdds) -> None:
    fresh = []
    for c in collisions:
        for con in constraints_for(c, resolve_collision(c, instance)):
            if con not in seen:
                seen.add(con)
                fresh.append(con)
    constraints.extend(fresh)
    rdds.add(fresh)


def _row(mu, state, ncoll, t0) -> str:
    return f"{mu:.6f}\t{state.num_vars}\t{state.num_clauses}\t{ncoll}\t{time.perf_counter() - t0:.6f}"


def initial_makespan(instance: Instance, bounds: Dict[int, Dict[int, float]]) -> float:
    """Longest of the agents' shortest individual durations."""
    mu = 0.0
    for a in instance.agent_ids:
        d = bounds[a][instance.start[a]]
        if math.isinf(d):
            raise NoSolution(f"agent {a} cannot reach its goal")
        mu = max(mu, d)
    return mu


def smt_cbs(instance: Instance, config: Optional[SmtCbsConfig] = None,
            on_model: Optional[ModelHook] = None, on_state: Optional[StateHook] = None) -> SmtCbsReport:
    cfg = config or SmtCbsConfig()
    t0 = time.perf_counter()
    deadline = None if cfg.time_limit is None else t0 + cfg.time_limit
    bounds = lower_bounds(instance, cfg.bounds)
    mu = initial_makespan(instance, bounds)
    constraints: List[Constraint] = []
    mutexes: dict = {}
    registry: Dict[int, dict] = {}
    schedule: List[float] = []
    rows: List[str] = []
    iterations = 0
    while True:
        if mu > cfg.mu_ceiling:
            raise ResourceLimit(f"makespan bound exceeded ceiling {cfg.mu_ceiling}")
        schedule.append(mu)
        res = smt_cbs_fixed(instance, constraints, mutexes, mu, bounds, rows, on_model, on_state,
                            deadline, cfg.seed, t0, cfg.generalize, registry)
        iterations += res.iterations
        if res.solution is not None:
            sol = Solution(tuple(TemporalPlan(p.agent, merge_waits(p.events)) for p in res.solution.plans))
            return SmtCbsReport(sol, iterations, len(mutexes), mu, schedule, rows)
        if res.mu_next is None:
            raise NoSolution(f"no decision beyond makespan {mu}")
        log.debug("mu %.6f unsat, next %.6f", mu, res.mu_next)
        mu = res.mu_next
