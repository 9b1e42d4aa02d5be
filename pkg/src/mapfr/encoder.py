"""Propositional encoding of RDDs.

Per agent there is one variable per RDD node, one per RDD edge and one
terminal variable per goal node (the agent parks there from that moment
on). The clauses force every selected node to be left through exactly one
edge or terminal, edges to imply both endpoints, at most one incoming edge
per node, the start node, and exactly one terminal. Collisions are excluded
lazily through binary mutex clauses between the two offending variables.

RDDs only grow while the makespan bound is fixed, so almost every clause is
permanent. The two kinds that a later growth step would have to weaken
("leave through one of the outgoing edges" and "pick one of the
terminals") carry a guard literal of the current round. The guard is
assumed false during solving; when the RDDs grow, the old guard is
asserted, which satisfies the stale clauses, and fresh ones are emitted
under a new guard.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .model import Collision, Instance, MotionEvent, Solution, TemporalPlan
from .rdd import Key, Rdd, qtime
from .sat import SatSolver


class EncodingError(RuntimeError):
    """Internal inconsistency between the formula, the RDDs and a model."""


VarKey = Tuple  # ("X", agent, node_key) | ("E", agent, from_key, to_key) | ("T", agent, node_key) | ("G", round)


@dataclass
class VarMap:
    ids: Dict[VarKey, int] = field(default_factory=dict)
    keys: List[VarKey] = field(default_factory=lambda: [None])

    def get(self, key: VarKey) -> int:
        v = self.ids.get(key)
        if v is None:
            v = len(self.keys)
            self.ids[key] = v
            self.keys.append(key)
        return v

    def __len__(self):
        return len(self.keys) - 1

    def count(self, kind: str) -> int:
        return sum(1 for k in self.keys[1:] if k[0] == kind)


def event_key(ev: MotionEvent) -> VarKey:
    """Variable key of the RDD element that produced a plan event."""
    if math.isinf(ev.t_end):
        return ("T", ev.agent, (ev.frm, qtime(ev.t_start)))
    return ("E", ev.agent, (ev.frm, qtime(ev.t_start)), (ev.to, qtime(ev.t_end)))


@dataclass
class EncodingState:
    varmap: VarMap
    solver: SatSolver
    mu: float
    rdds: List[Rdd]
    instance: Instance
    mutexes: Dict[FrozenSet[VarKey], None]
    # recorded pairs whose variables do not all exist in the current RDDs
    pending_mutexes: List[FrozenSet[VarKey]] = field(default_factory=list)
    outs: Dict[Tuple[int, Key], List[int]] = field(default_factory=dict)
    ins: Dict[Tuple[int, Key], List[int]] = field(default_factory=dict)
    terms: Dict[int, List[int]] = field(default_factory=dict)
    guard: Optional[int] = None
    rounds: int = 0
    no_goal: bool = False
    encoded_edges: Dict[int, int] = field(default_factory=dict)
    rebuilds: int = 0

    @property
    def num_vars(self) -> int:
        return len(self.varmap)

    @property
    def num_clauses(self) -> int:
        return self.solver.num_clauses

    def assumptions(self) -> List[int]:
        return [-self.guard] if self.guard is not None else []

    def solve(self, conflict_limit: Optional[int] = None) -> Optional[bool]:
        if self.no_goal:
            return False
        return self.solver.solve(conflict_limit, self.assumptions())

    def dimacs(self) -> str:
        """DIMACS text with the current guard asserted, so it stands alone."""
        text = self.solver.to_dimacs()
        if self.guard is None:
            return text
        head, _, body = text.partition("\n")
        _, _, nv, nc = head.split()
        return f"p cnf {nv} {int(nc) + 1}\n{body}{-self.guard} 0\n"

    def var_table(self) -> str:
        """Sidecar text mapping variable ids to agents, vertices and times."""
        rows = []
        for v, key in enumerate(self.varmap.keys[1:], 1):
            if key[0] == "G":
                rows.append(f"{v}\tG\t-\tround {key[1]}")
                continue
            parts = [f"{k[0]}@{k[1] * 1e-6:.6f}" for k in key[2:]]
            rows.append(f"{v}\t{key[0]}\t{key[1]}\t" + "\t".join(parts))
        return "\n".join(rows) + "\n"


def _sort_key(k: Key):
    return (k[1], k[0])


def _grow(state: EncodingState, rdds: Sequence[Rdd]) -> None:
    """Emit clauses for every RDD element not encoded yet, then refresh guarded clauses."""
    vm, s, inst = state.varmap, state.solver, state.instance
    ids = vm.ids
    state.rdds = list(rdds)
    state.no_goal = False
    new_vars_before = len(vm)
    pending: List[Tuple[int, ...]] = []
    for rdd in rdds:
        a = rdd.agent
        goal = inst.goal[a]
        terms = state.terms.setdefault(a, [])
        start_key = (inst.start[a], 0)
        for k in sorted(rdd.nodes, key=_sort_key):
            xk = ("X", a, k)
            if xk in ids:
                continue
            x = vm.get(xk)
            state.outs[(a, k)] = []
            state.ins[(a, k)] = []
            if k == start_key:
                pending.append((x,))
            if k[0] == goal:
                t = vm.get(("T", a, k))
                pending.append((-t, x))
                pending.extend((-t, -o) for o in terms)
                terms.append(t)
                state.outs[(a, k)].append(t)
        for ek in sorted(rdd.edges, key=lambda e: (_sort_key(e[0]), _sort_key(e[1]))):
            key = ("E", a, ek[0], ek[1])
            if key in ids:
                continue
            e = vm.get(key)
            xf, xt = ids[("X", a, ek[0])], ids[("X", a, ek[1])]
            pending.append((-e, xf))
            pending.append((-e, xt))
            outs, ins = state.outs[(a, ek[0])], state.ins[(a, ek[1])]
            pending.extend((-e, -o) for o in outs)
            pending.extend((-e, -i) for i in ins)
            outs.append(e)
            ins.append(e)
            state.encoded_edges[a] = state.encoded_edges.get(a, 0) + 1
        if start_key not in rdd.nodes or not terms:
            state.no_goal = True
    grown = len(vm) > new_vars_before
    for _ in range(len(vm) - s.nvars):
        s.new_var()
    for c in pending:
        s.add_clause(c)
    _emit_mutexes(state)
    if grown or state.guard is None:
        _refresh_guard(state)


def _refresh_guard(state: EncodingState) -> None:
    vm, s = state.varmap, state.solver
    if state.guard is not None:
        s.add_clause((state.guard,))  # retire the previous round's guarded clauses
    state.rounds += 1
    g = vm.get(("G", state.rounds))
    s.new_var()
    state.guard = g
    for rdd in state.rdds:
        a = rdd.agent
        for k in sorted(rdd.nodes, key=_sort_key):
            x = vm.ids[("X", a, k)]
            s.add_clause(tuple([-x] + state.outs[(a, k)] + [g]))
        if state.terms.get(a):
            s.add_clause(tuple(state.terms[a] + [g]))


def _emit_mutexes(state: EncodingState) -> int:
    ids = state.varmap.ids
    added = 0
    keep = []
    for pair in state.pending_mutexes:
        ka, kb = sorted(pair)
        if ka in ids and kb in ids:
            state.solver.add_clause((-ids[ka], -ids[kb]))
            added += 1
        else:
            keep.append(pair)
    state.pending_mutexes = keep
    return added


def encode_basic(rdds: Sequence[Rdd], instance: Instance,
                 mutexes: Optional[Dict[FrozenSet[VarKey], None]] = None,
                 mu: float = math.inf, seed: int = 0) -> EncodingState:
    """Fresh formula for the given RDDs, re-emitting every recorded mutex that applies.

    ``mutexes`` is shared, not copied: pairs recorded later are visible to
    the caller, which is how they carry over to larger makespan bounds.
    """
    state = EncodingState(VarMap(), SatSolver(seed=seed), mu, [], instance,
                          mutexes if mutexes is not None else {})
    state.pending_mutexes = list(state.mutexes)
    _grow(state, rdds)
    return state


def augment_basic(state: EncodingState, rdds: Sequence[Rdd]) -> EncodingState:
    """Extend the formula to grown RDDs of the same bound, keeping variable ids.

    If some encoded element is missing from the new RDDs (they shrank), the
    formula is rebuilt from scratch with the same recorded mutexes.
    """
    ids = state.varmap.ids
    for rdd in rdds:
        a = rdd.agent
        known = sum(1 for k in rdd.edges if ("E", a, k[0], k[1]) in ids)
        if known != state.encoded_edges.get(a, 0):
            fresh = encode_basic(rdds, state.instance, state.mutexes, state.mu, state.solver.seed)
            rebuilds = state.rebuilds + 1
            state.__dict__.update(fresh.__dict__)
            state.rebuilds = rebuilds
            return state
    _grow(state, rdds)
    return state


def add_collision_mutexes(state: EncodingState, collisions: Iterable[Collision]) -> int:
    """Forbid each colliding event pair; returns how many new pairs were recorded."""
    return add_mutex_pairs(state, ((event_key(c.event_i), event_key(c.event_j)) for c in collisions))


def add_mutex_pairs(state: EncodingState, pairs: Iterable[Tuple[VarKey, VarKey]]) -> int:
    """Record and emit mutexes given directly as variable-key pairs."""
    added = 0
    for ka, kb in pairs:
        for k in (ka, kb):
            if k not in state.varmap.ids:
                raise EncodingError(f"collision event {k} has no variable")
        pair = frozenset((ka, kb))
        if pair in state.mutexes:
            continue
        state.mutexes[pair] = None
        state.pending_mutexes.append(pair)
        added += 1
    _emit_mutexes(state)
    return added


def extract_solution(state: EncodingState, model: Sequence[bool]) -> Solution:
    """Follow the selected edges of every agent from its start to its terminal."""
    plans = []
    ids = state.varmap.ids
    inst = state.instance
    for rdd in state.rdds:
        a = rdd.agent
        goal = inst.goal[a]
        k = (inst.start[a], 0)
        events = []
        for _ in range(len(rdd.nodes) + 1):
            nxt = [k2 for k2 in rdd.out.get(k, ()) if model[ids[("E", a, k, k2)]]]
            term = k[0] == goal and model[ids[("T", a, k)]]
            if term + len(nxt) != 1:
                raise EncodingError(f"agent {a}: {term + len(nxt)} successors selected at {k}")
            if term:
                break
            src, dst = rdd.nodes[k], rdd.nodes[nxt[0]]
            events.append(MotionEvent(a, src.vertex, dst.vertex, src.time, dst.time))
            k = nxt[0]
        else:
            raise EncodingError(f"agent {a}: selected chain does not terminate")
        plans.append(TemporalPlan(a, tuple(events)))
    return Solution(tuple(plans))
