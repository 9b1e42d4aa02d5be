"""A small incremental CDCL SAT solver.

Literals follow the DIMACS convention on the public surface (``v`` / ``-v``);
internally literal ``2*v`` is positive and ``2*v + 1`` negative. Features:
two watched literals, first-UIP learning with local minimization, VSIDS
branching, phase saving, geometric restarts and LBD-based learnt clause
reduction. Clauses may be added between ``solve`` calls; learnt clauses and
activities are kept.
"""
from __future__ import annotations

import heapq
import random
from typing import Dict, Iterable, List, Optional, Sequence


class SatError(ValueError):
    pass


class SatSolver:
    def __init__(self, seed: int = 0):
        self.seed = seed
        self._rng = random.Random(seed)
        self.nvars = 0
        self.original: List[List[int]] = []  # DIMACS clauses as added
        self._clauses: List[list] = []
        self._learnts: List[list] = []
        self._lbd: Dict[int, int] = {}
        self._val: List[int] = [0, 0]  # per internal literal: 1 true, -1 false, 0 free
        self._level: List[int] = [0]
        self._reason: List[Optional[list]] = [None]
        self._activity: List[float] = [0.0]
        self._polarity: List[bool] = [False]
        self._seen: List[bool] = [False]
        self._watches: List[List[list]] = [[], []]
        self._heap: list = []
        self._trail: List[int] = []
        self._trail_lim: List[int] = []
        self._qhead = 0
        self._var_inc = 1.0
        self._unsat = False
        self.model: Optional[List[bool]] = None
        self.stats = {"conflicts": 0, "decisions": 0, "propagations": 0, "restarts": 0, "solves": 0}

    # -- building ---------------------------------------------------------

    def new_var(self) -> int:
        self.nvars += 1
        self._val += [0, 0]
        self._level.append(0)
        self._reason.append(None)
        self._activity.append(self._rng.random() * 1e-5)
        self._polarity.append(False)
        self._seen.append(False)
        self._watches += [[], []]
        heapq.heappush(self._heap, (-self._activity[-1], self.nvars))
        return self.nvars

    def new_vars(self, n: int) -> List[int]:
        return [self.new_var() for _ in range(n)]

    def add_clause(self, lits: Iterable[int]) -> None:
        lits = list(lits)
        if not lits:
            raise SatError("empty clause")
        for l in lits:
            if l == 0 or abs(l) > self.nvars:
                raise SatError(f"literal {l} references an unallocated variable")
        self.original.append(lits)
        if self._unsat:
            return
        if self._trail_lim:
            self._backtrack(0)
        val = self._val
        seen = set()
        out = []
        for l in lits:
            il = 2 * l if l > 0 else -2 * l + 1
            if il ^ 1 in seen:
                return  # tautology
            if il in seen:
                continue
            v = val[il]
            if v == 1:
                return  # satisfied at level 0
            if v == -1:
                continue
            seen.add(il)
            out.append(il)
        if not out:
            self._unsat = True
        elif len(out) == 1:
            self._enqueue(out[0], None)
            if self._propagate() is not None:
                self._unsat = True
        else:
            self._clauses.append(out)
            self._watches[out[0]].append(out)
            self._watches[out[1]].append(out)

    # -- core -------------------------------------------------------------

    def _enqueue(self, lit: int, reason) -> None:
        self._val[lit] = 1
        self._val[lit ^ 1] = -1
        v = lit >> 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(lit)

    def _propagate(self):
        val = self._val
        watches = self._watches
        trail = self._trail
        level = self._level
        reason = self._reason
        lvl = len(self._trail_lim)
        nprop = 0
        while self._qhead < len(trail):
            p = trail[self._qhead]
            self._qhead += 1
            nprop += 1
            fl = p ^ 1
            ws = watches[fl]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == fl:
                    c[0] = c[1]
                    c[1] = fl
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = fl
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.stats["propagations"] += nprop
                        return c
                    val[first] = 1
                    val[first ^ 1] = -1
                    v = first >> 1
                    level[v] = lvl
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
        self.stats["propagations"] += nprop
        return None

    def _bump(self, v: int) -> None:
        act = self._activity
        act[v] += self._var_inc
        if act[v] > 1e100:
            for k in range(1, self.nvars + 1):
                act[k] *= 1e-100
            self._var_inc *= 1e-100
            self._heap = [(-act[k], k) for k in range(1, self.nvars + 1) if self._val[2 * k] == 0]
            heapq.heapify(self._heap)
        elif self._val[2 * v] == 0:
            heapq.heappush(self._heap, (-act[v], v))

    def _analyze(self, confl):
        seen = self._seen
        level = self._level
        reason = self._reason
        trail = self._trail
        cur = len(self._trail_lim)
        learnt = [0]
        path = 0
        p = -1
        idx = len(trail) - 1
        c = confl
        touched = []
        while True:
            for q in (c if p == -1 else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    touched.append(v)
                    self._bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            c = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # local minimization: drop literals implied by other learnt literals
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None or any(not seen[x >> 1] and level[x >> 1] > 0 for x in r[1:]):
                keep.append(q)
        for v in touched:
            seen[v] = False
        learnt = keep
        if len(learnt) == 1:
            bt = 0
        else:
            mi = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bt = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        return learnt, bt, lbd

    def _backtrack(self, lvl: int) -> None:
        if len(self._trail_lim) <= lvl:
            return
        lim = self._trail_lim[lvl]
        val = self._val
        heap = self._heap
        act = self._activity
        pol = self._polarity
        for lit in self._trail[lim:]:
            v = lit >> 1
            val[lit] = 0
            val[lit ^ 1] = 0
            self._reason[v] = None
            pol[v] = (lit & 1) == 0
            heapq.heappush(heap, (-act[v], v))
        del self._trail[lim:]
        del self._trail_lim[lvl:]
        self._qhead = lim

    def _pick(self) -> int:
        heap = self._heap
        val = self._val
        while heap:
            _, v = heapq.heappop(heap)
            if val[2 * v] == 0:
                return v
        return 0

    def _reduce(self) -> None:
        locked = {id(self._reason[l >> 1]) for l in self._trail if self._reason[l >> 1] is not None}
        cands = [c for c in self._learnts if len(c) > 2 and id(c) not in locked]
        cands.sort(key=lambda c: (self._lbd.get(id(c), 99), len(c)))
        drop = {id(c) for c in cands[len(cands) // 2:] if self._lbd.get(id(c), 99) > 2}
        if not drop:
            return
        self._learnts = [c for c in self._learnts if id(c) not in drop]
        for k in drop:
            self._lbd.pop(k, None)
        for ws in self._watches:
            ws.clear()
        for c in self._clauses:
            self._watches[c[0]].append(c)
            self._watches[c[1]].append(c)
        for c in self._learnts:
            self._watches[c[0]].append(c)
            self._watches[c[1]].append(c)

    def solve(self, conflict_limit: Optional[int] = None, assumptions: Sequence[int] = ()) -> Optional[bool]:
        """``True`` (model in ``self.model``), ``False``, or ``None`` if the budget ran out.

        ``assumptions`` are literals fixed for this call only; ``False`` then
        means unsatisfiable under them, and later calls may still succeed.
        """
        self.stats["solves"] += 1
        assume = []
        for l in assumptions:
            if l == 0 or abs(l) > self.nvars:
                raise SatError(f"assumption {l} references an unallocated variable")
            assume.append(2 * l if l > 0 else -2 * l + 1)
        self.model = None
        if self._unsat:
            return False
        self._backtrack(0)
        if self._propagate() is not None:
            self._unsat = True
            return False
        restart_limit = 100.0
        conflicts_here = 0
        since_restart = 0
        next_reduce = 2000 + len(self._learnts)
        decay = 1 / 0.95
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                conflicts_here += 1
                since_restart += 1
                if not self._trail_lim:
                    self._unsat = True
                    return False
                learnt, bt, lbd = self._analyze(confl)
                self._backtrack(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._learnts.append(learnt)
                    self._lbd[id(learnt)] = lbd
                    self._watches[learnt[0]].append(learnt)
                    self._watches[learnt[1]].append(learnt)
                    self._enqueue(learnt[0], learnt)
                self._var_inc *= decay
                continue
            if conflict_limit is not None and conflicts_here >= conflict_limit:
                self._backtrack(0)
                return None
            if since_restart >= restart_limit:
                self.stats["restarts"] += 1
                since_restart = 0
                restart_limit *= 1.5
                self._backtrack(0)
                continue
            if len(self._learnts) >= next_reduce:
                self._reduce()
                next_reduce = len(self._learnts) + 2000
            lvl = len(self._trail_lim)
            if lvl < len(assume):
                p = assume[lvl]
                if self._val[p] == -1:
                    self._backtrack(0)
                    return False
                self._trail_lim.append(len(self._trail))
                if self._val[p] == 0:
                    self._enqueue(p, None)
                continue
            v = self._pick()
            if v == 0:
                val = self._val
                self.model = [False] + [val[2 * k] == 1 for k in range(1, self.nvars + 1)]
                return True
            self.stats["decisions"] += 1
            self._trail_lim.append(len(self._trail))
            self._enqueue(2 * v if self._polarity[v] else 2 * v + 1, None)

    def value(self, v: int) -> bool:
        if self.model is None:
            raise SatError("no model available")
        return self.model[v]

    @property
    def num_clauses(self) -> int:
        return len(self.original)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.nvars} {len(self.original)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.original]
        return "\n".join(lines) + "\n"


def solve_cnf(clauses: Sequence[Sequence[int]], nvars: Optional[int] = None, seed: int = 0):
    """One-shot helper: returns ``(sat, model)`` where model maps var -> bool."""
    n = nvars if nvars is not None else max((abs(l) for c in clauses for l in c), default=0)
    s = SatSolver(seed)
    s.new_vars(n)
    for c in clauses:
        s.add_clause(c)
    ok = s.solve()
    return ok, ({v: s.model[v] for v in range(1, n + 1)} if ok else None)


def parse_dimacs(text: str) -> tuple:
    """``(nvars, clauses)`` from DIMACS CNF text."""
    nvars = None
    clauses: List[List[int]] = []
    cur: List[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise SatError(f"line {lineno}: bad header")
            nvars = int(parts[2])
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(x)
    if nvars is None:
        raise SatError("missing p cnf header")
    if cur:
        clauses.append(cur)
    return nvars, clauses
