from collections import deque

import pytest

from sfcplan.curve import CurveSpec, index_to_cell

_ACCEPTANCE = []


def flood_fill(spec: CurveSpec, start: int, blocked, eight: bool) -> frozenset:
    """Reachable waypoints via a coordinate-grid flood fill.

    Written against cell coordinates only, independently of WaypointGraph.
    """
    n = spec.side_cells
    cells = {index_to_cell(spec, d): d for d in range(spec.num_waypoints)}
    free = [[True] * n for _ in range(n)]
    for d in blocked:
        x, y = index_to_cell(spec, d)
        free[x][y] = False
    sx, sy = index_to_cell(spec, start)
    steps = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)
             if (dx or dy) and (eight or not (dx and dy))]
    seen = [[False] * n for _ in range(n)]
    seen[sx][sy] = True
    stack = deque([(sx, sy)])
    while stack:
        x, y = stack.pop()
        for dx, dy in steps:
            u, v = x + dx, y + dy
            if 0 <= u < n and 0 <= v < n and free[u][v] and not seen[u][v]:
                seen[u][v] = True
                stack.append((u, v))
    return frozenset(cells[(x, y)] for x in range(n) for y in range(n) if seen[x][y])


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::", 1)[1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name}")


@pytest.fixture
def flood():
    return flood_fill
