"""Benchmark ingestion, grid graph construction and text serialization.

Maps and scenarios follow the movingai.com formats. Grid cells become
vertices at integer coordinates (column x, row y). Instances and
solutions have small line-oriented formats of their own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from .model import Agent, Instance, MotionEvent, ModelError, Solution, TemporalPlan

DEFAULT_RADIUS = math.sqrt(2) / 4
DEFAULT_SPEED = 1.0

PASSABLE = set(".G")
BLOCKED = set("@OTSW")


class FormatError(ValueError):
    def __init__(self, msg: str, line: int = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    passable: Tuple[bool, ...]

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise FormatError("map dimensions must be positive")
        if len(self.passable) != self.width * self.height:
            raise FormatError("passable array does not match dimensions")

    def free(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height and self.passable[y * self.width + x]

    def vertex(self, x: int, y: int) -> int:
        return y * self.width + x

    @classmethod
    def open(cls, width: int, height: int) -> "GridMap":
        return cls(width, height, (True,) * (width * height))


@dataclass(frozen=True)
class ScenarioEntry:
    bucket: int
    map_name: str
    width: int
    height: int
    start: Tuple[int, int]
    goal: Tuple[int, int]
    optimal_length: float


def parse_map(text: str) -> GridMap:
    lines = text.splitlines()
    header = {}
    expect = ["type", "height", "width"]
    for i, key in enumerate(expect):
        if i >= len(lines):
            raise FormatError(f"missing '{key}' header", i + 1)
        parts = lines[i].split()
        if len(parts) != 2 or parts[0] != key:
            raise FormatError(f"expected '{key} <value>'", i + 1)
        header[key] = parts[1]
    if len(lines) < 4 or lines[3].strip() != "map":
        raise FormatError("expected 'map'", 4)
    try:
        h, w = int(header["height"]), int(header["width"])
    except ValueError:
        raise FormatError("non-integer dimension", 2) from None
    if h <= 0 or w <= 0:
        raise FormatError("dimensions must be positive", 2)
    rows = lines[4:]
    # tolerate a single trailing empty line, nothing else
    while rows and rows[-1] == "" and len(rows) > h:
        rows.pop()
    if len(rows) != h:
        raise FormatError(f"expected {h} rows, found {len(rows)}", 4 + min(len(rows), h) + 1)
    cells = []
    for r, row in enumerate(rows):
        lineno = 5 + r
        row = row.rstrip("\r")
        if len(row) != w:
            raise FormatError(f"row length {len(row)} != width {w}", lineno)
        for ch in row:
            if ch in PASSABLE:
                cells.append(True)
            elif ch in BLOCKED:
                cells.append(False)
            else:
                raise FormatError(f"unknown glyph {ch!r}", lineno)
    return GridMap(w, h, tuple(cells))


def parse_scen(text: str) -> List[ScenarioEntry]:
    lines = text.splitlines()
    if not lines or lines[0].split()[:1] != ["version"]:
        raise FormatError("expected 'version' header", 1)
    out = []
    for i, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        f = line.split("\t")
        if len(f) != 9:
            raise FormatError(f"expected 9 tab-separated fields, got {len(f)}", i)
        try:
            bucket, w, h, sx, sy, gx, gy = (int(f[k]) for k in (0, 2, 3, 4, 5, 6, 7))
            opt = float(f[8])
        except ValueError as e:
            raise FormatError(f"bad field: {e}", i) from None
        for x, y in ((sx, sy), (gx, gy)):
            if not (0 <= x < w and 0 <= y < h):
                raise FormatError(f"cell ({x},{y}) out of bounds", i)
        out.append(ScenarioEntry(bucket, f[1], w, h, (sx, sy), (gx, gy), opt))
    return out


def move_vectors(k: int) -> List[Tuple[int, int]]:
    """The 2^K canonical move directions."""
    if k not in (2, 3, 4, 5):
        raise ValueError("K must be in 2..5")
    base = [(1, 0), (0, 1)]
    if k >= 3:
        base += [(1, 1)]
    if k >= 4:
        base += [(1, 2), (2, 1)]
    if k >= 5:
        base += [(1, 3), (3, 1), (2, 3), (3, 2)]
    out = set()
    for dx, dy in base:
        for sx in (1, -1):
            for sy in (1, -1):
                out.add((sx * dx, sy * dy))
    return sorted(out)


def supercover(x0: int, y0: int, x1: int, y1: int) -> List[Tuple[int, int]]:
    """Cells whose closed unit square meets the open segment between two cell centers."""
    dx, dy = x1 - x0, y1 - y0
    cells = set()
    # each cell (cx, cy) spans [cx-0.5, cx+0.5] x [cy-0.5, cy+0.5]; clip the segment against it
    for cx in range(min(x0, x1) - 1, max(x0, x1) + 2):
        for cy in range(min(y0, y1) - 1, max(y0, y1) + 2):
            lo, hi = 0.0, 1.0
            ok = True
            for p, d, c in ((x0, dx, cx), (y0, dy, cy)):
                a, b = c - 0.5 - p, c + 0.5 - p
                if d == 0:
                    if a > 0 or b < 0:
                        ok = False
                        break
                else:
                    t1, t2 = a / d, b / d
                    if t1 > t2:
                        t1, t2 = t2, t1
                    lo, hi = max(lo, t1), min(hi, t2)
            # the open segment (0,1) must meet the closed square
            if ok and lo <= hi and hi > 0 and lo < 1:
                cells.add((cx, cy))
    return sorted(cells)


def build_graph(grid: GridMap, k: int) -> Tuple[Dict[int, Tuple[float, float]], List[Tuple[int, int]]]:
    """Vertex positions and undirected edges of the 2^K grid graph."""
    positions = {}
    for y in range(grid.height):
        for x in range(grid.width):
            if grid.free(x, y):
                positions[grid.vertex(x, y)] = (float(x), float(y))
    edges = []
    vecs = [v for v in move_vectors(k) if v > (0, 0)]
    for y in range(grid.height):
        for x in range(grid.width):
            if not grid.free(x, y):
                continue
            for dx, dy in vecs:
                x1, y1 = x + dx, y + dy
                if not grid.free(x1, y1):
                    continue
                if all(grid.free(cx, cy) for cx, cy in supercover(x, y, x1, y1)):
                    edges.append((grid.vertex(x, y), grid.vertex(x1, y1)))
    return positions, edges


def make_instance(grid: GridMap, entries: Sequence[ScenarioEntry], k_agents: int, neighborhood: int = 3,
                  radius: float = DEFAULT_RADIUS, speed: float = DEFAULT_SPEED) -> Instance:
    if k_agents <= 0 or k_agents > len(entries):
        raise ValueError(f"need 1..{len(entries)} agents, got {k_agents}")
    positions, edges = build_graph(grid, neighborhood)
    agents, start, goal = [], {}, {}
    for i, e in enumerate(entries[:k_agents], 1):
        for x, y in (e.start, e.goal):
            if not grid.free(x, y):
                raise ValueError(f"entry {i}: cell ({x},{y}) is blocked")
        agents.append(Agent(i, radius, speed))
        start[i] = grid.vertex(*e.start)
        goal[i] = grid.vertex(*e.goal)
    if len(set(start.values())) != len(start) or len(set(goal.values())) != len(goal):
        raise ValueError("duplicate start or goal vertices")
    return Instance.build(positions, edges, agents, start, goal)


# -- instance / solution text formats ----------------------------------------


def write_instance(inst: Instance) -> str:
    lines = ["VERTICES"]
    for v in sorted(inst.positions):
        x, y = inst.positions[v]
        lines.append(f"{v} {x!r} {y!r}")
    lines.append("EDGES")
    for u, v in sorted(tuple(sorted(e)) for e in inst.edges):
        lines.append(f"{u} {v}")
    lines.append("AGENTS")
    for a in inst.agents:
        lines.append(f"{a.id} {a.radius!r} {a.speed!r} {inst.start[a.id]} {inst.goal[a.id]}")
    return "\n".join(lines) + "\n"


def read_instance(text: str) -> Instance:
    sections = {"VERTICES": [], "EDGES": [], "AGENTS": []}
    arity = {"VERTICES": 3, "EDGES": 2, "AGENTS": 5}
    cur = None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.isupper() and line.isalpha():
            if line not in sections:
                raise FormatError(f"unknown section {line!r}", i)
            cur = line
            continue
        if cur is None:
            raise FormatError("data before first section header", i)
        parts = line.split()
        if len(parts) != arity[cur]:
            raise FormatError(f"{cur} line needs {arity[cur]} fields", i)
        try:
            if cur == "VERTICES":
                row = (int(parts[0]), float(parts[1]), float(parts[2]))
            elif cur == "EDGES":
                row = (int(parts[0]), int(parts[1]))
            else:
                row = (int(parts[0]), float(parts[1]), float(parts[2]), int(parts[3]), int(parts[4]))
        except ValueError as e:
            raise FormatError(str(e), i) from None
        sections[cur].append((i, row))
    positions = {}
    for i, (v, x, y) in sections["VERTICES"]:
        if v in positions:
            raise FormatError(f"duplicate vertex {v}", i)
        positions[v] = (x, y)
    try:
        agents = [Agent(a, r, s) for _, (a, r, s, _, _) in sections["AGENTS"]]
        return Instance.build(
            positions,
            [row for _, row in sections["EDGES"]],
            agents,
            {a: s for _, (a, _, _, s, _) in sections["AGENTS"]},
            {a: g for _, (a, _, _, _, g) in sections["AGENTS"]},
        )
    except ModelError as e:
        raise FormatError(str(e)) from None


def write_solution(sol: Solution) -> str:
    lines = []
    for p in sorted(sol.plans, key=lambda p: p.agent):
        for e in p.events:
            lines.append(f"{e.agent} {e.frm} {e.to} {e.t_start:.6f} {e.t_end:.6f}")
    return "\n".join(lines) + ("\n" if lines else "")


def read_solution(text: str, instance: Instance = None) -> Solution:
    """Parse event lines; agents of ``instance`` without lines get empty plans."""
    events: Dict[int, List[MotionEvent]] = {}
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 5:
            raise FormatError("expected 'agent from to t_start t_end'", i)
        try:
            a, u, v = int(parts[0]), int(parts[1]), int(parts[2])
            ts, te = float(parts[3]), float(parts[4])
        except ValueError as e:
            raise FormatError(str(e), i) from None
        events.setdefault(a, []).append(MotionEvent(a, u, v, ts, te))
    ids = list(events)
    if instance is not None:
        ids = sorted(set(ids) | set(instance.agent_ids))
    return Solution(tuple(TemporalPlan(a, tuple(events.get(a, ()))) for a in sorted(ids)))
