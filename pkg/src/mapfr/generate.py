"""Seeded random instances on small open grids (cross-validation corpus)."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .formats import DEFAULT_RADIUS, GridMap, build_graph
from .model import Agent, Instance


@dataclass(frozen=True)
class GridShape:
    size: int
    neighborhood: int
    agents: int


def random_grid_instance(rng: random.Random, sizes: Sequence[int] = (4, 6), neighborhoods: Sequence[int] = (2, 3),
                         agents: Sequence[int] = (2, 3, 4), radius: float = DEFAULT_RADIUS,
                         speed: float = 1.0) -> tuple:
    """One open-grid instance with distinct random starts and goals; returns ``(instance, shape)``."""
    n = rng.choice(list(sizes))
    k = rng.choice(list(neighborhoods))
    a = rng.randint(min(agents), max(agents))
    pos, edges = build_graph(GridMap.open(n, n), k)
    vs = list(pos)
    starts, goals = rng.sample(vs, a), rng.sample(vs, a)
    inst = Instance.build(pos, edges, [Agent(i + 1, radius, speed) for i in range(a)],
                          {i + 1: starts[i] for i in range(a)}, {i + 1: goals[i] for i in range(a)})
    return inst, GridShape(n, k, a)


def corpus(seed: int, count: int, **kw) -> Iterator[tuple]:
    rng = random.Random(seed)
    for _ in range(count):
        yield random_grid_instance(rng, **kw)
