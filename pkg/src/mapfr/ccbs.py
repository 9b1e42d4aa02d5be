"""Continuous-time conflict-based search ordered by makespan.

The low level is a safe-interval search: vertex bans cut each vertex's
timeline into safe intervals, edge bans forbid departures in given
windows, and the earliest arrival per (vertex, safe interval) dominates
later ones because waiting inside a safe interval is always allowed.
"""
from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .geometry import constraints_for, resolve_collision, validate_plans
from .model import EPS_T, INF, Collision, Constraint, Instance, MotionEvent, Solution, TemporalPlan
from .rdd import graph_bounds

log = logging.getLogger(__name__)


class NoSolution(RuntimeError):
    """The instance (or a search branch) admits no plan."""


class SearchLimit(RuntimeError):
    """A configured budget (time or node count) ran out."""


def safe_intervals(bans: Iterable[Tuple[float, float]]) -> List[Tuple[float, float]]:
    """Complement of the union of half-open bans on ``[0, inf)``."""
    out = []
    cur = 0.0
    for lo, hi in sorted(bans):
        if lo > cur:
            out.append((cur, lo))
        cur = max(cur, hi)
        if math.isinf(cur):
            return out
    out.append((cur, INF))
    return out


def _earliest_departure(s: float, bans: Sequence[Tuple[float, float]]) -> float:
    """Smallest ``t >= s`` not inside any ban (bans sorted by ``lo``)."""
    moved = True
    while moved:
        moved = False
        for lo, hi in bans:
            if lo <= s < hi:
                s = hi
                moved = True
    return s


def shortest_temporal_plan(instance: Instance, aid: int, constraints: Iterable[Constraint],
                           bounds: Optional[Dict[int, float]] = None) -> Optional[TemporalPlan]:
    """Earliest-arrival plan for one agent, or ``None`` when the goal is unreachable."""
    speed = instance.agent(aid).speed
    h = bounds if bounds is not None else graph_bounds(instance, aid)
    edge_bans: Dict[Tuple[int, int], List[Tuple[float, float]]] = {}
    vertex_bans: Dict[int, List[Tuple[float, float]]] = {}
    for c in constraints:
        if c.agent != aid:
            continue
        if c.is_vertex:
            vertex_bans.setdefault(c.frm, []).append((c.t_lo, c.t_hi))
        else:
            edge_bans.setdefault((c.frm, c.to), []).append((c.t_lo, c.t_hi))
    for k in edge_bans:
        edge_bans[k].sort()
    sis: Dict[int, List[Tuple[float, float]]] = {}

    def si(v):
        if v not in sis:
            sis[v] = safe_intervals(vertex_bans.get(v, ()))
        return sis[v]

    start, goal = instance.start[aid], instance.goal[aid]
    if math.isinf(h[start]):
        return None
    first = si(start)
    if not first or first[0][0] > 0.0:
        return None
    best: Dict[Tuple[int, int], float] = {(start, 0): 0.0}
    parent: Dict[Tuple[int, int], Optional[Tuple[Tuple[int, int], float]]] = {(start, 0): None}
    tie = itertools.count()
    pq = [(h[start], next(tie), 0.0, start, 0)]
    while pq:
        _, _, g, u, idx = heapq.heappop(pq)
        if g > best[(u, idx)]:
            continue
        intervals = si(u)
        if u == goal and idx == len(intervals) - 1 and math.isinf(intervals[idx][1]):
            return _rebuild(aid, (u, idx), parent, best)
        e = intervals[idx][1]
        for v in instance.neighbors(u):
            if math.isinf(h[v]):
                continue
            d = instance.dist(u, v) / speed
            bans = edge_bans.get((u, v), ())
            for j, (jlo, jhi) in enumerate(si(v)):
                if jhi <= g + d:
                    continue
                s = _earliest_departure(max(g, jlo - d), bans)
                if not (s < e and s + d < jhi):
                    if s >= e:
                        break
                    continue
                arr = s + d
                key = (v, j)
                if arr < best.get(key, INF) - 1e-12:
                    best[key] = arr
                    parent[key] = ((u, idx), s)
                    heapq.heappush(pq, (arr + h[v], next(tie), arr, v, j))
    return None


def _rebuild(aid, key, parent, best) -> TemporalPlan:
    events: List[MotionEvent] = []
    while parent[key] is not None:
        (pk, s) = parent[key]
        arr = best[key]
        events.append(MotionEvent(aid, pk[0], key[0], s, arr))
        g = best[pk]
        if s > g + 1e-12:
            events.append(MotionEvent(aid, pk[0], pk[0], g, s))
        key = pk
    events.reverse()
    return TemporalPlan(aid, tuple(events))


@dataclass
class CtNode:
    constraints: FrozenSet[Constraint]
    plans: Dict[int, TemporalPlan]
    mu: float
    depth: int = 0

    def solution(self, instance: Instance) -> Solution:
        return Solution(tuple(self.plans[a] for a in instance.agent_ids))


@dataclass
class CcbsReport:
    solution: Solution
    expanded: int
    generated: int
    makespan: float
    log: List[str] = field(default_factory=list)


def pick_collision(collisions: Sequence[Collision]) -> Collision:
    return min(collisions, key=lambda c: (c.contact_time, tuple(sorted(c.agents))))


def ccbs(instance: Instance, time_limit: Optional[float] = None, node_limit: Optional[int] = None,
         on_node: Optional[Callable[[CtNode], None]] = None) -> CcbsReport:
    """Best-first constraint-tree search; the first collision-free node popped is makespan-optimal."""
    t0 = time.perf_counter()
    bounds = {a: graph_bounds(instance, a) for a in instance.agent_ids}
    plans = {}
    for a in instance.agent_ids:
        p = shortest_temporal_plan(instance, a, (), bounds[a])
        if p is None:
            raise NoSolution(f"agent {a} cannot reach its goal")
        plans[a] = p
    root = CtNode(frozenset(), plans, _mu(plans))
    tie = itertools.count()
    pq = [(root.mu, 0, next(tie), root)]
    expanded, generated = 0, 1
    rows = []
    while pq:
        if time_limit is not None and time.perf_counter() - t0 > time_limit:
            raise SearchLimit(f"time limit {time_limit}s reached")
        if node_limit is not None and expanded >= node_limit:
            raise SearchLimit(f"node limit {node_limit} reached")
        _, _, _, node = heapq.heappop(pq)
        expanded += 1
        if on_node is not None:
            on_node(node)
        sol = node.solution(instance)
        collisions = validate_plans(sol, instance)
        rows.append(f"{node.mu:.6f}\t{len(node.constraints)}\t0\t{len(collisions)}\t{time.perf_counter() - t0:.6f}")
        if not collisions:
            return CcbsReport(sol, expanded, generated, node.mu, rows)
        c = pick_collision(collisions)
        for con in constraints_for(c, resolve_collision(c, instance)):
            if con in node.constraints:
                # the same constraint again means the resolved interval did not cover the event
                log.warning("repeated constraint %s", con)
                continue
            cons = node.constraints | {con}
            p = shortest_temporal_plan(instance, con.agent, cons, bounds[con.agent])
            if p is None:
                continue
            child_plans = dict(node.plans)
            child_plans[con.agent] = p
            child = CtNode(cons, child_plans, _mu(child_plans), node.depth + 1)
            generated += 1
            heapq.heappush(pq, (child.mu, len(cons), next(tie), child))
    raise NoSolution("constraint tree exhausted")


def _mu(plans: Dict[int, TemporalPlan]) -> float:
    return max(p.end_time for p in plans.values())
