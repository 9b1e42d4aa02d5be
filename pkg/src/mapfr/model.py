"""Domain types for continuous-time multi-agent path finding.

All types are frozen dataclasses. Times are floats in time-units,
coordinates in length-units; comparisons go through ``EPS_T`` / ``EPS_G``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

EPS_T = 1e-6  # time tolerance
EPS_G = 1e-9  # geometric tolerance
INF = math.inf


class ModelError(ValueError):
    """Raised when an instance or plan violates a well-formedness rule."""


@dataclass(frozen=True)
class Agent:
    id: int
    radius: float
    speed: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ModelError(f"agent {self.id}: radius must be positive, got {self.radius}")
        if not (self.speed > 0 and math.isfinite(self.speed)):
            raise ModelError(f"agent {self.id}: speed must be positive, got {self.speed}")


@dataclass(frozen=True)
class Instance:
    """Graph with 2D vertex positions plus agents and their start/goal vertices."""

    positions: Mapping[int, Tuple[float, float]]
    edges: frozenset
    agents: Tuple[Agent, ...]
    start: Mapping[int, int]
    goal: Mapping[int, int]
    _adj: Dict[int, Tuple[int, ...]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        adj: Dict[int, List[int]] = {v: [] for v in self.positions}
        for v, (x, y) in self.positions.items():
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ModelError(f"vertex {v} has non-finite coordinates")
        for e in self.edges:
            u, v = tuple(e)
            if u not in self.positions or v not in self.positions:
                raise ModelError(f"edge {u}-{v} references an undeclared vertex")
            if self.dist(u, v) <= EPS_G:
                raise ModelError(f"edge {u}-{v} has zero length")
            adj[u].append(v)
            adj[v].append(u)
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise ModelError("duplicate agent ids")
        for name, m in (("start", self.start), ("goal", self.goal)):
            if set(m) != set(ids):
                raise ModelError(f"{name} map must be defined for exactly the agents")
            if len(set(m.values())) != len(m):
                raise ModelError(f"{name} map is not injective")
            for v in m.values():
                if v not in self.positions:
                    raise ModelError(f"{name} vertex {v} is not declared")
        object.__setattr__(self, "_adj", {v: tuple(sorted(ns)) for v, ns in adj.items()})

    @classmethod
    def build(cls, positions, edges, agents, start, goal) -> "Instance":
        """Normalizing constructor; ``edges`` may be any iterable of vertex pairs."""
        es = set()
        for u, v in edges:
            if u == v:
                raise ModelError(f"self-loop edge at vertex {u}")
            es.add(frozenset((u, v)))
        return cls(
            positions={int(k): (float(x), float(y)) for k, (x, y) in positions.items()},
            edges=frozenset(es),
            agents=tuple(agents),
            start=dict(start),
            goal=dict(goal),
        )

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self.edges

    def dist(self, u: int, v: int) -> float:
        (x1, y1), (x2, y2) = self.positions[u], self.positions[v]
        return math.hypot(x2 - x1, y2 - y1)

    def agent(self, aid: int) -> Agent:
        for a in self.agents:
            if a.id == aid:
                return a
        raise KeyError(aid)

    def duration(self, aid: int, u: int, v: int) -> float:
        return self.dist(u, v) / self.agent(aid).speed

    @property
    def agent_ids(self) -> List[int]:
        return [a.id for a in self.agents]


@dataclass(frozen=True)
class MotionEvent:
    """One move along an edge (``frm != to``) or a wait (``frm == to``)."""

    agent: int
    frm: int
    to: int
    t_start: float
    t_end: float

    @property
    def is_wait(self) -> bool:
        return self.frm == self.to

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class TemporalPlan:
    agent: int
    events: Tuple[MotionEvent, ...]

    @property
    def end_time(self) -> float:
        # an empty plan is legal only for an agent that starts on its goal
        return self.events[-1].t_end if self.events else 0.0


@dataclass(frozen=True)
class Solution:
    plans: Tuple[TemporalPlan, ...]

    @property
    def makespan(self) -> float:
        return makespan(self)

    def plan(self, aid: int) -> TemporalPlan:
        for p in self.plans:
            if p.agent == aid:
                return p
        raise KeyError(aid)


@dataclass(frozen=True)
class Constraint:
    """Agent may not start ``frm -> to`` in ``[t_lo, t_hi)``.

    With ``frm == to`` the constraint is a vertex ban: the agent may not be
    at ``frm`` at any instant of ``[t_lo, t_hi)``.
    """

    agent: int
    frm: int
    to: int
    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not self.t_lo < self.t_hi:
            raise ModelError(f"empty constraint interval [{self.t_lo}, {self.t_hi})")

    @property
    def is_vertex(self) -> bool:
        return self.frm == self.to

    def contains(self, t: float) -> bool:
        return self.t_lo <= t < self.t_hi


@dataclass(frozen=True)
class Collision:
    event_i: MotionEvent
    event_j: MotionEvent
    contact_time: float

    def __post_init__(self):
        if self.event_i.agent == self.event_j.agent:
            raise ModelError("a collision needs two distinct agents")

    @property
    def agents(self) -> Tuple[int, int]:
        return self.event_i.agent, self.event_j.agent


def plan_position(plan: TemporalPlan, instance: Instance, t: float) -> Tuple[float, float]:
    """Center of the agent's disc at time ``t`` (parked at both ends)."""
    if not plan.events:
        return instance.positions[instance.start[plan.agent]]
    first = plan.events[0]
    if t <= first.t_start:
        return instance.positions[first.frm]
    for ev in plan.events:
        if ev.t_start <= t < ev.t_end:
            (x1, y1), (x2, y2) = instance.positions[ev.frm], instance.positions[ev.to]
            if ev.is_wait:
                return (x1, y1)
            f = (t - ev.t_start) / (ev.t_end - ev.t_start)
            return (x1 + f * (x2 - x1), y1 + f * (y2 - y1))
    return instance.positions[plan.events[-1].to]


def check_plan(plan: TemporalPlan, instance: Instance, eps_t: float = EPS_T) -> Optional[str]:
    """Return ``None`` for a well-formed plan, else a description of the first violation."""
    try:
        agent = instance.agent(plan.agent)
    except KeyError:
        return f"unknown agent {plan.agent}"
    if not plan.events:
        if instance.start[plan.agent] == instance.goal[plan.agent]:
            return None
        return "empty plan"
    evs = plan.events
    if abs(evs[0].t_start) > eps_t:
        return f"plan does not start at t=0 (event 0 starts at {evs[0].t_start})"
    if evs[0].frm != instance.start[plan.agent]:
        return "event 0 does not leave the start vertex"
    if evs[-1].to != instance.goal[plan.agent]:
        return f"event {len(evs) - 1} does not end at the goal vertex"
    for i, ev in enumerate(evs):
        if ev.agent != plan.agent:
            return f"event {i} belongs to agent {ev.agent}"
        if ev.frm not in instance.positions or ev.to not in instance.positions:
            return f"unknown vertex at event {i}"
        if not ev.t_start < ev.t_end:
            return f"non-positive duration at event {i}"
        if not ev.is_wait:
            if not instance.has_edge(ev.frm, ev.to):
                return f"no edge {ev.frm}-{ev.to} at event {i}"
            expected = instance.dist(ev.frm, ev.to) / agent.speed
            if abs(ev.duration - expected) > eps_t:
                return f"duration mismatch at event {i}: {ev.duration} vs {expected}"
        if i > 0:
            prev = evs[i - 1]
            if prev.to != ev.frm or abs(prev.t_end - ev.t_start) > eps_t:
                return f"chain break at event {i}"
    return None


def makespan(solution: Solution) -> float:
    if not solution.plans:
        raise ModelError("solution has no plans")
    return max(p.end_time for p in solution.plans)


def merge_waits(events: Iterable[MotionEvent]) -> Tuple[MotionEvent, ...]:
    """Fuse consecutive waits at the same vertex into one event."""
    out: List[MotionEvent] = []
    for ev in events:
        if out and ev.is_wait and out[-1].is_wait and out[-1].to == ev.frm:
            prev = out.pop()
            ev = MotionEvent(ev.agent, ev.frm, ev.to, prev.t_start, ev.t_end)
        out.append(ev)
    return tuple(out)


def unit_square_instance(radius: float = 0.2, speed: float = 1.0) -> Instance:
    """Two agents crossing the diagonals of the unit square.

    Vertices 1..4 sit at (0,0), (1,0), (0,1), (1,1); agent 1 goes 1 -> 4 and
    agent 2 goes 2 -> 3. All six vertex pairs are connected.
    """
    pos = {1: (0.0, 0.0), 2: (1.0, 0.0), 3: (0.0, 1.0), 4: (1.0, 1.0)}
    edges = [(1, 2), (1, 3), (2, 4), (3, 4), (1, 4), (2, 3)]
    agents = [Agent(1, radius, speed), Agent(2, radius, speed)]
    return Instance.build(pos, edges, agents, {1: 1, 2: 2}, {1: 4, 2: 3})
