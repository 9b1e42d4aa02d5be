"""Real decision diagrams: per-agent graphs of timed (vertex, time) decisions.

Starting from ``(start, 0)``, decisions are expanded in time order. Each
expansion adds the move to every neighbor and, where collision-avoidance
constraints interfere, a wait until the end of the unsafe interval.
Decisions that cannot reach the goal within ``mu_max`` are dropped; the
smallest bound among dropped decisions is kept as the frontier, which is
where the next makespan candidate comes from.
"""
from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .model import EPS_T, INF, Constraint, Instance

Key = Tuple[int, int]


def qtime(t: float) -> int:
    """Quantized time used for node identity."""
    return int(round(t / EPS_T))


@dataclass(frozen=True)
class RddNode:
    vertex: int
    time: float

    @property
    def key(self) -> Key:
        return (self.vertex, qtime(self.time))


@dataclass(frozen=True)
class RddEdge:
    frm: RddNode
    to: RddNode

    @property
    def is_wait(self) -> bool:
        return self.frm.vertex == self.to.vertex

    @property
    def key(self) -> Tuple[Key, Key]:
        return (self.frm.key, self.to.key)


@dataclass
class Rdd:
    agent: int
    nodes: Dict[Key, RddNode] = field(default_factory=dict)
    edges: Dict[Tuple[Key, Key], RddEdge] = field(default_factory=dict)
    out: Dict[Key, List[Key]] = field(default_factory=lambda: defaultdict(list))
    inc: Dict[Key, List[Key]] = field(default_factory=lambda: defaultdict(list))
    frontier: float = INF

    def goal_nodes(self, goal: int) -> List[RddNode]:
        return sorted((n for n in self.nodes.values() if n.vertex == goal), key=lambda n: n.time)

    def dump(self) -> str:
        """Text table of nodes and edges with 6-decimal times."""
        lines = [f"RDD agent {self.agent}", "NODES"]
        for n in sorted(self.nodes.values(), key=lambda n: (n.time, n.vertex)):
            lines.append(f"{n.vertex} {n.time:.6f}")
        lines.append("EDGES")
        for e in sorted(self.edges.values(), key=lambda e: (e.frm.time, e.frm.vertex, e.to.time, e.to.vertex)):
            lines.append(f"{e.frm.vertex} {e.frm.time:.6f} -> {e.to.vertex} {e.to.time:.6f}")
        return "\n".join(lines) + "\n"


def graph_bounds(instance: Instance, aid: int) -> Dict[int, float]:
    """Shortest travel time from every vertex to the agent's goal (Dijkstra)."""
    speed = instance.agent(aid).speed
    goal = instance.goal[aid]
    dist = {goal: 0.0}
    pq = [(0.0, goal)]
    while pq:
        d, u = heapq.heappop(pq)
        if d > dist.get(u, INF):
            continue
        for v in instance.neighbors(u):
            nd = d + instance.dist(u, v) / speed
            if nd < dist.get(v, INF):
                dist[v] = nd
                heapq.heappush(pq, (nd, v))
    return {v: dist.get(v, INF) for v in instance.positions}


def euclidean_bounds(instance: Instance, aid: int) -> Dict[int, float]:
    speed = instance.agent(aid).speed
    g = instance.goal[aid]
    return {v: instance.dist(v, g) / speed for v in instance.positions}


def lower_bounds(instance: Instance, kind: str = "graph") -> Dict[int, Dict[int, float]]:
    fn = {"graph": graph_bounds, "euclidean": euclidean_bounds}[kind]
    return {aid: fn(instance, aid) for aid in instance.agent_ids}


def _group(constraints: Iterable[Constraint], aid: int):
    edge_bans: Dict[Tuple[int, int], List[Tuple[float, float]]] = defaultdict(list)
    vertex_bans: Dict[int, List[Tuple[float, float]]] = defaultdict(list)
    for c in constraints:
        if c.agent != aid:
            continue
        if c.is_vertex:
            vertex_bans[c.frm].append((c.t_lo, c.t_hi))
        else:
            edge_bans[(c.frm, c.to)].append((c.t_lo, c.t_hi))
    for d in (edge_bans, vertex_bans):
        for k in d:
            d[k] = sorted(set(d[k]))
    return edge_bans, vertex_bans


def build_rdd(instance: Instance, aid: int, constraints: Iterable[Constraint], mu_max: float,
              bounds: Optional[Dict[int, float]] = None, registry: Optional[Dict[Key, float]] = None) -> Rdd:
    """Decision diagram of one agent for makespan bound ``mu_max``.

    ``registry`` maps node keys to the float time first used for them.
    Sharing it between builds keeps node times, and so successor keys,
    identical across rebuilds; the diagram then only grows as constraints
    are added.
    """
    speed = instance.agent(aid).speed
    h = bounds if bounds is not None else graph_bounds(instance, aid)
    edge_bans, vertex_bans = _group(constraints, aid)
    rdd = Rdd(aid)
    limit = mu_max + EPS_T
    s = instance.start[aid]
    if h[s] > limit:
        rdd.frontier = h[s]
        return rdd
    root = RddNode(s, 0.0)
    rdd.nodes[root.key] = root
    pq = [(0.0, s, root.key)]
    done = set()

    def add(src: RddNode, v: int, t: float):
        bound = t + h[v]
        if bound > limit:
            if bound < rdd.frontier:
                rdd.frontier = bound
            return
        k = (v, qtime(t))
        if k == src.key:
            return
        if registry is not None:
            t = registry.setdefault(k, t)
        node = RddNode(v, t)
        existing = rdd.nodes.get(k)
        if existing is None:
            rdd.nodes[k] = node
            heapq.heappush(pq, (t, v, k))
        else:
            node = existing
        ek = (src.key, k)
        if ek not in rdd.edges:
            rdd.edges[ek] = RddEdge(src, node)
            rdd.out[src.key].append(k)
            rdd.inc[k].append(src.key)

    while pq:
        t, u, k = heapq.heappop(pq)
        if k in done:
            continue
        done.add(k)
        src = rdd.nodes[k]
        t = src.time
        for v in instance.neighbors(u):
            d = instance.dist(u, v) / speed
            add(src, v, t + d)
            for lo, hi in edge_bans.get((u, v), ()):
                if lo <= t < hi and math.isfinite(hi) and hi - t > EPS_T:
                    add(src, u, hi)
            for lo, hi in vertex_bans.get(v, ()):
                if math.isfinite(hi) and hi - d - t > EPS_T:
                    add(src, u, hi - d)
    return rdd


def build_rdds(instance: Instance, constraints: Iterable[Constraint], mu_max: float,
               bounds: Optional[Dict[int, Dict[int, float]]] = None,
               registry: Optional[Dict[int, Dict[Key, float]]] = None) -> List[Rdd]:
    constraints = list(constraints)
    if bounds is None:
        bounds = lower_bounds(instance)
    return [build_rdd(instance, aid, constraints, mu_max, bounds[aid],
                      None if registry is None else registry.setdefault(aid, {}))
            for aid in instance.agent_ids]


def rdd_goal_nodes(rdd: Rdd, instance: Instance) -> List[RddNode]:
    return rdd.goal_nodes(instance.goal[rdd.agent])


def next_makespan(rdds: Sequence[Rdd], mu: float) -> float:
    """Smallest decision time (or frontier bound) strictly beyond ``mu``."""
    best = INF
    for r in rdds:
        if r.frontier > mu + EPS_T:
            best = min(best, r.frontier)
        for n in r.nodes.values():
            if n.time > mu + EPS_T and n.time < best:
                best = n.time
    if math.isinf(best):
        raise ValueError(f"no decision beyond makespan {mu}")
    return best
