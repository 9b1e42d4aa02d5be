"""Continuous collision detection between moving discs.

Every motion event is turned into a :class:`KinematicSegment` (a point moving
with constant velocity over a half-open time span). Two discs collide when
their center distance drops strictly below ``r_i + r_j - eps_g``; touching is
legal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .model import (
    EPS_G,
    EPS_T,
    INF,
    Collision,
    Constraint,
    Instance,
    MotionEvent,
    Solution,
    TemporalPlan,
    check_plan,
)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi})")

    def contains(self, t: float) -> bool:
        return self.lo <= t < self.hi


@dataclass(frozen=True)
class KinematicSegment:
    x: float
    y: float
    vx: float
    vy: float
    t_a: float
    t_b: float

    def at(self, t: float) -> Tuple[float, float]:
        dt = t - self.t_a
        return self.x + self.vx * dt, self.y + self.vy * dt

    def shifted(self, t_a: float) -> "KinematicSegment":
        return KinematicSegment(self.x, self.y, self.vx, self.vy, t_a, t_a + (self.t_b - self.t_a))


def segment_of(event: MotionEvent, instance: Instance) -> KinematicSegment:
    x0, y0 = instance.positions[event.frm]
    if event.is_wait:
        return KinematicSegment(x0, y0, 0.0, 0.0, event.t_start, event.t_end)
    x1, y1 = instance.positions[event.to]
    dt = event.t_end - event.t_start
    return KinematicSegment(x0, y0, (x1 - x0) / dt, (y1 - y0) / dt, event.t_start, event.t_end)


def parking_event(plan: TemporalPlan, instance: Instance) -> MotionEvent:
    """The infinite stay at the goal that follows the last event."""
    g = instance.goal[plan.agent]
    return MotionEvent(plan.agent, g, g, plan.end_time, INF)


def _roots(a: float, b: float, c: float) -> List[float]:
    """Real roots of a*x^2 + b*x + c (degenerate cases included)."""
    if abs(a) < 1e-300:
        if abs(b) < 1e-300:
            return []
        return [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    if q == 0.0:
        return [0.0]
    return sorted((q / a, c / q))


def collide(seg_i: KinematicSegment, r_i: float, seg_j: KinematicSegment, r_j: float,
            eps_g: float = EPS_G) -> Optional[float]:
    """Earliest time the two discs overlap, or ``None``."""
    lo = max(seg_i.t_a, seg_j.t_a)
    hi = min(seg_i.t_b, seg_j.t_b)
    if not lo < hi:
        raise ValueError("segments do not overlap in time")
    xi, yi = seg_i.at(lo)
    xj, yj = seg_j.at(lo)
    dx, dy = xi - xj, yi - yj
    wx, wy = seg_i.vx - seg_j.vx, seg_i.vy - seg_j.vy
    rr = r_i + r_j - eps_g
    c = dx * dx + dy * dy - rr * rr
    if c < 0:
        return lo
    a = wx * wx + wy * wy
    if a == 0.0:
        return None
    b = 2.0 * (dx * wx + dy * wy)
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return None
    sq = math.sqrt(disc)
    s2 = (-b + sq) / (2.0 * a)
    if s2 <= 0.0:
        return None
    # c >= 0 and s2 > 0 imply the smaller root is non-negative
    s1 = c / (a * s2) if s2 > 0 else 0.0
    t = lo + max(s1, 0.0)
    return t if t < hi else None


def events_collide(ev_a: MotionEvent, ev_b: MotionEvent, instance: Instance,
                   eps_g: float = EPS_G) -> Optional[float]:
    """Earliest contact of two timed events (``None`` if disjoint in time or clear)."""
    if not max(ev_a.t_start, ev_b.t_start) < min(ev_a.t_end, ev_b.t_end):
        return None
    return collide(segment_of(ev_a, instance), instance.agent(ev_a.agent).radius,
                   segment_of(ev_b, instance), instance.agent(ev_b.agent).radius, eps_g)


def _agent_segments(plan: TemporalPlan, instance: Instance) -> List[Tuple[MotionEvent, KinematicSegment]]:
    out = [(ev, segment_of(ev, instance)) for ev in plan.events]
    park = parking_event(plan, instance)
    out.append((park, segment_of(park, instance)))
    return out


def first_collision(plan_i: TemporalPlan, plan_j: TemporalPlan, instance: Instance,
                    eps_g: float = EPS_G) -> Optional[Collision]:
    """Earliest collision between two plans (parking included), if any."""
    ri = instance.agent(plan_i.agent).radius
    rj = instance.agent(plan_j.agent).radius
    si = _agent_segments(plan_i, instance)
    sj = _agent_segments(plan_j, instance)
    a = b = 0
    while a < len(si) and b < len(sj):
        ev_a, seg_a = si[a]
        ev_b, seg_b = sj[b]
        if max(seg_a.t_a, seg_b.t_a) < min(seg_a.t_b, seg_b.t_b):
            t = collide(seg_a, ri, seg_b, rj, eps_g)
            if t is not None:
                return Collision(ev_a, ev_b, t)
        if seg_a.t_b <= seg_b.t_b:
            a += 1
        else:
            b += 1
    return None


def validate_plans(solution: Solution, instance: Instance, eps_g: float = EPS_G,
                   eps_t: float = EPS_T) -> List[Collision]:
    """At most one (the earliest) collision per agent pair; empty iff collision-free."""
    for p in solution.plans:
        err = check_plan(p, instance, eps_t)
        if err is not None:
            raise ValueError(f"malformed plan for agent {p.agent}: {err}")
    plans = sorted(solution.plans, key=lambda p: p.agent)
    out = []
    for x in range(len(plans)):
        for y in range(x + 1, len(plans)):
            c = first_collision(plans[x], plans[y], instance, eps_g)
            if c is not None:
                out.append(c)
    return out


# ---------------------------------------------------------------------------
# unsafe intervals


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def _occupancy_window(pos: Tuple[float, float], fixed: KinematicSegment, rr: float) -> Optional[Tuple[float, float]]:
    """Open window of instants at which a disc parked at ``pos`` overlaps ``fixed``."""
    dx, dy = fixed.x - pos[0], fixed.y - pos[1]
    vx, vy = fixed.vx, fixed.vy
    a = vx * vx + vy * vy
    c = dx * dx + dy * dy - rr * rr
    if a == 0.0:
        return (fixed.t_a, fixed.t_b) if c < 0 else None
    b = 2.0 * (dx * vx + dy * vy)
    disc = b * b - 4 * a * c
    if disc <= 0:
        return None
    r1, r2 = _roots(a, b, c)
    lo = max(fixed.t_a, fixed.t_a + r1)
    hi = min(fixed.t_b, fixed.t_a + r2)
    return (lo, hi) if lo < hi else None


def _move_start_window(moving: KinematicSegment, fixed: KinematicSegment, rr: float) -> Optional[Tuple[float, float]]:
    """Projection onto start times ``s`` of the set of (u, s) with overlap.

    ``u`` is the time elapsed inside the moving event. The overlap region is
    the intersection of a convex quadratic sublevel set with a parallelogram,
    so the projection is an interval; its endpoints are attained at vertices,
    edge crossings or tangency points, all of which are enumerated.
    """
    d_i = moving.t_b - moving.t_a
    t_j, d_j = fixed.t_a, fixed.t_b - fixed.t_a
    A_i = (moving.x, moving.y)
    V_i = (moving.vx, moving.vy)
    A_j = (fixed.x, fixed.y)
    V_j = (fixed.vx, fixed.vy)
    W = (V_i[0] - V_j[0], V_i[1] - V_j[1])
    C = (A_i[0] - A_j[0] + V_j[0] * t_j, A_i[1] - A_j[1] + V_j[1] * t_j)
    r2 = rr * rr

    def diff(u, s):
        return (C[0] + W[0] * u - V_j[0] * s, C[1] + W[1] * u - V_j[1] * s)

    def f(u, s):
        d = diff(u, s)
        return _dot(d, d) - r2

    if math.isinf(d_j):
        # fixed disc is parked forever: only u matters once s >= t_j
        us = [0.0, d_i]
        ac = (A_i[0] - A_j[0], A_i[1] - A_j[1])
        aa, bb, cc = _dot(V_i, V_i), 2 * _dot(ac, V_i), _dot(ac, ac) - r2
        us += [u for u in _roots(aa, bb, cc) if 0.0 <= u <= d_i]
        inside = [u for u in us if aa * u * u + bb * u + cc <= 1e-12]
        if not inside:
            return None
        u_max = max(inside)
        return (t_j - u_max, INF)

    tol = 1e-9 * max(1.0, abs(t_j), d_i, d_j)
    cands: List[Tuple[float, float]] = []
    # parallelogram vertices
    for u in (0.0, d_i):
        for tt in (t_j, t_j + d_j):
            cands.append((u, tt - u))
    # f = 0 along u = const
    vv = _dot(V_j, V_j)
    for u0 in (0.0, d_i):
        base = (C[0] + W[0] * u0, C[1] + W[1] * u0)
        for s in _roots(vv, -2 * _dot(base, V_j), _dot(base, base) - r2):
            cands.append((u0, s))
    # f = 0 along u + s = const: diff = (A_i - A_j - V_j * k) + V_i * u
    for k in (0.0, d_j):
        base = (A_i[0] - A_j[0] - V_j[0] * k, A_i[1] - A_j[1] - V_j[1] * k)
        for u in _roots(_dot(V_i, V_i), 2 * _dot(base, V_i), _dot(base, base) - r2):
            cands.append((u, t_j + k - u))
    # tangency of the ellipse boundary in the s direction
    ww = _dot(W, W)
    if ww > 1e-18:
        cw, vw = _dot(C, W) / ww, _dot(V_j, W) / ww
        P = (C[0] - cw * W[0], C[1] - cw * W[1])
        Q = (vw * W[0] - V_j[0], vw * W[1] - V_j[1])
        for s in _roots(_dot(Q, Q), 2 * _dot(P, Q), _dot(P, P) - r2):
            cands.append((vw * s - cw, s))
    else:
        for s in _roots(vv, -2 * _dot(C, V_j), _dot(C, C) - r2):
            u_lo, u_hi = max(0.0, t_j - s), min(d_i, t_j + d_j - s)
            if u_lo <= u_hi:
                cands.append((0.5 * (u_lo + u_hi), s))

    ok = [
        s for u, s in cands
        if -tol <= u <= d_i + tol and t_j - tol <= u + s <= t_j + d_j + tol and f(u, s) <= 1e-9
    ]
    if not ok:
        return None
    lo, hi = min(ok), max(ok)
    if not lo < hi:
        return None
    return lo, hi


def _bisect(pred: Callable[[float], bool], good: float, bad: float, iters: int = 64) -> float:
    """Boundary between ``good`` (pred true) and ``bad`` (pred false); returns a point where pred is false."""
    for _ in range(iters):
        mid = 0.5 * (good + bad)
        if mid == good or mid == bad:
            break
        if pred(mid):
            good = mid
        else:
            bad = mid
    return bad


def _start_predicate(moving: KinematicSegment, r_m: float, fixed: KinematicSegment, r_f: float,
                     eps_g: float) -> Callable[[float], bool]:
    def pred(s: float) -> bool:
        seg = moving.shifted(s)
        if not max(seg.t_a, fixed.t_a) < min(seg.t_b, fixed.t_b):
            return False
        return collide(seg, r_m, fixed, r_f, eps_g) is not None
    return pred


def unsafe_interval(moving: MotionEvent, fixed: MotionEvent, instance: Instance,
                    eps_g: float = EPS_G) -> Optional[Interval]:
    """Maximal unsafe interval for ``moving`` against the fixed event of another agent.

    For a move, the result is the set of start times at which the same move
    collides with ``fixed`` (computed with half of ``eps_g``, so it slightly
    over-approximates the validation predicate). For a wait or parking event the result is the
    window of instants during which standing at the vertex collides; it is
    what a vertex ban on that agent must cover. ``hi`` may be ``inf``.
    """
    r_m = instance.agent(moving.agent).radius
    r_f = instance.agent(fixed.agent).radius
    # half the validation tolerance: a start at ``hi`` keeps a margin of eps_g / 2
    eps_g = 0.5 * eps_g
    rr = r_m + r_f - eps_g
    fseg = segment_of(fixed, instance)
    if moving.is_wait:
        w = _occupancy_window(instance.positions[moving.frm], fseg, rr)
        if w is None:
            return None
        lo, hi = max(w[0], 0.0), w[1]
        return Interval(lo, hi) if lo < hi else None

    mseg = segment_of(moving, instance)
    pred = _start_predicate(mseg, r_m, fseg, r_f, eps_g)
    w = _move_start_window(mseg, fseg, rr)
    if w is None:
        return None
    lo, hi = w
    mid = 0.5 * (lo + hi) if math.isfinite(hi) else lo + 1.0
    if not pred(mid) and not pred(moving.t_start):
        return None
    lo = max(lo, 0.0)
    if math.isfinite(hi):
        hi = _certify_hi(pred, hi)
    if not lo < hi:
        return None
    return Interval(lo, hi)


def _certify_hi(pred: Callable[[float], bool], hi: float) -> float:
    """Nudge ``hi`` until the predicate is false there (absorbs rounding)."""
    if not pred(hi):
        return hi
    step = max(1e-12, abs(hi) * 1e-15)
    bad = hi + step
    while pred(bad):
        step *= 2.0
        bad = hi + step
    return _bisect(pred, hi, bad)


def unsafe_interval_bisect(moving: MotionEvent, fixed: MotionEvent, instance: Instance,
                           eps_g: float = EPS_G, horizon: float = 1e6) -> Optional[Interval]:
    """Reference computation by exponential search and bisection around the actual start.

    Only valid when the actual start of ``moving`` collides.
    """
    r_m = instance.agent(moving.agent).radius
    r_f = instance.agent(fixed.agent).radius
    mseg, fseg = segment_of(moving, instance), segment_of(fixed, instance)
    pred = _start_predicate(mseg, r_m, fseg, r_f, 0.5 * eps_g)
    s0 = moving.t_start
    if not pred(s0):
        return None
    step = 1e-3
    while pred(s0 + step):
        step *= 2.0
        if s0 + step > horizon:
            return Interval(max(0.0, _lower(pred, s0)), INF)
    hi = _bisect(pred, s0, s0 + step)
    return Interval(max(0.0, _lower(pred, s0)), hi)


def _lower(pred, s0: float) -> float:
    step = 1e-3
    while s0 - step >= -1e6 and pred(s0 - step):
        step *= 2.0
    # lowest start that still collides
    bad, good = s0 - step, s0
    for _ in range(64):
        mid = 0.5 * (good + bad)
        if mid in (good, bad):
            break
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def resolve_collision(c: Collision, instance: Instance, eps_g: float = EPS_G) -> Tuple[Interval, Interval]:
    """Unsafe intervals for both sides of a collision, each against the other's fixed event."""
    return (
        _resolve_side(c.event_i, c.event_j, c, instance, eps_g),
        _resolve_side(c.event_j, c.event_i, c, instance, eps_g),
    )


def _resolve_side(ev: MotionEvent, other: MotionEvent, c: Collision, instance: Instance,
                  eps_g: float) -> Interval:
    iv = unsafe_interval(ev, other, instance, eps_g)
    anchor = c.contact_time if ev.is_wait else ev.t_start
    if iv is not None and iv.contains(anchor):
        return iv
    if not ev.is_wait:
        ref = unsafe_interval_bisect(ev, other, instance, eps_g)
        if ref is not None:
            return ref
    # touching-distance numerics: fall back to a minimal interval around the anchor
    return Interval(anchor, anchor + EPS_T)


def constraints_for(c: Collision, intervals: Tuple[Interval, Interval]) -> Tuple[Constraint, Constraint]:
    """Turn resolved intervals into one constraint per colliding agent."""
    out = []
    for ev, iv in zip((c.event_i, c.event_j), intervals):
        out.append(Constraint(ev.agent, ev.frm, ev.to, iv.lo, iv.hi))
    return tuple(out)
