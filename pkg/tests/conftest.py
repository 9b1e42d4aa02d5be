import math

import pytest

from mapfr.formats import DEFAULT_RADIUS, GridMap, build_graph
from mapfr.model import Agent, Instance, unit_square_instance


@pytest.fixture
def square():
    return unit_square_instance()


def grid_instance(n, k, starts, goals, radius=DEFAULT_RADIUS, speed=1.0):
    pos, edges = build_graph(GridMap.open(n, n), k)
    agents = [Agent(i + 1, radius, speed) for i in range(len(starts))]
    return Instance.build(pos, edges, agents, {i + 1: s for i, s in enumerate(starts)},
                          {i + 1: g for i, g in enumerate(goals)})


SQRT2 = math.sqrt(2)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
