"""Dual graph of a Hilbert tessellation and the visited-frontier operator."""
from __future__ import annotations

import enum
from collections import deque
from typing import AbstractSet, Dict, FrozenSet, Iterable, List, Set, Tuple

from .curve import Cell, CurveSpec, index_to_cell


class Connectivity(enum.Enum):
    FOUR = "four"
    EIGHT = "eight"

    @property
    def offsets(self) -> Tuple[Cell, ...]:
        if self is Connectivity.FOUR:
            return ((0, -1), (-1, 0), (1, 0), (0, 1))
        return ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1))


class WaypointGraph:
    """Waypoints of a curve as vertices, geometrically adjacent cells as edges.

    Adjacency lists are materialized once; each list is sorted by index.
    Instances are treated as immutable.
    """

    def __init__(self, spec: CurveSpec, connectivity: Connectivity = Connectivity.FOUR):
        self.spec = spec
        self.connectivity = Connectivity(connectivity)
        n = spec.side_cells
        N = spec.num_waypoints
        self._cells: List[Cell] = [index_to_cell(spec, d) for d in range(N)]
        index_of: Dict[Cell, int] = {c: d for d, c in enumerate(self._cells)}
        offsets = self.connectivity.offsets
        adj: List[Tuple[int, ...]] = []
        for x, y in self._cells:
            nbrs = [
                index_of[(x + dx, y + dy)]
                for dx, dy in offsets
                if 0 <= x + dx < n and 0 <= y + dy < n
            ]
            adj.append(tuple(sorted(nbrs)))
        self._adj = adj
        self._index_of = index_of

    def __len__(self) -> int:
        return len(self._adj)

    def __repr__(self) -> str:
        return (
            f"WaypointGraph(iteration={self.spec.iteration}, "
            f"connectivity={self.connectivity.value})"
        )

    def neighbors(self, d: int) -> Tuple[int, ...]:
        return self._adj[d]

    def cell(self, d: int) -> Cell:
        return self._cells[d]

    def index(self, cell: Cell) -> int:
        try:
            return self._index_of[cell]
        except KeyError:
            raise IndexError(f"cell {cell} is outside the grid") from None

    def are_adjacent(self, a: int, b: int) -> bool:
        (ax, ay), (bx, by) = self._cells[a], self._cells[b]
        dx, dy = abs(ax - bx), abs(ay - by)
        if self.connectivity is Connectivity.FOUR:
            return dx + dy == 1
        return max(dx, dy) == 1

    def edges(self) -> Iterable[Tuple[int, int]]:
        for a, nbrs in enumerate(self._adj):
            for b in nbrs:
                if a < b:
                    yield a, b

    def num_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj) // 2


def build_waypoint_graph(
    spec: CurveSpec, connectivity: Connectivity = Connectivity.FOUR
) -> WaypointGraph:
    return WaypointGraph(spec, connectivity)


def frontier(G: WaypointGraph, V: AbstractSet[int], O: AbstractSet[int]) -> List[int]:
    """Unvisited, non-obstacle vertices with at least one visited neighbour.

    Returned in ascending order, so ``frontier(...)[0]`` is the minimum.
    """
    out: Set[int] = set()
    for v in V:
        for u in G.neighbors(v):
            if u not in V and u not in O:
                out.add(u)
    return sorted(out)


def reachable_set(G: WaypointGraph, start: int, blocked: AbstractSet[int]) -> FrozenSet[int]:
    """Vertices reachable from ``start`` by breadth-first search avoiding ``blocked``."""
    if start in blocked:
        raise ValueError(f"start waypoint {start} is blocked")
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in G.neighbors(v):
            if u not in seen and u not in blocked:
                seen.add(u)
                queue.append(u)
    return frozenset(seen)
