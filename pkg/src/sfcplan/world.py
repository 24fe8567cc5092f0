"""Ground-truth obstacle worlds and the one-cell sensor.

Random worlds are drawn with PCG32 (PCG-XSH-RR, 64-bit state, 32-bit
output) so that a seed reproduces the same world on any platform and in any
language that implements the same generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from shapely.geometry import Polygon, box

from .curve import Cell, CurveSpec, cell_to_index, index_to_cell
from .graph import Connectivity

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1
_PCG_MULT = 6364136223846793005
DEFAULT_STREAM = 54

Rect = Tuple[float, float, float, float]


class Pcg32:
    """PCG-XSH-RR 64/32 generator, seeded as in the reference ``pcg32_srandom_r``."""

    def __init__(self, seed: int, stream: int = DEFAULT_STREAM):
        self.state = 0
        self.inc = ((stream << 1) | 1) & _MASK64
        self.next_u32()
        self.state = (self.state + (seed & _MASK64)) & _MASK64
        self.next_u32()

    def next_u32(self) -> int:
        old = self.state
        self.state = (old * _PCG_MULT + self.inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & _MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & _MASK32

    def bounded(self, bound: int) -> int:
        """Unbiased integer in ``[0, bound)`` by rejection, ``bound < 2**32``."""
        if not 0 < bound <= _MASK32:
            raise ValueError(f"bound must be in 1..2**32-1, got {bound}")
        threshold = ((1 << 32) - bound) % bound
        while True:
            r = self.next_u32()
            if r >= threshold:
                return r % bound


@dataclass(frozen=True)
class WorldOracle:
    """Hidden blocked cells of one tessellation; the planner never reads them."""

    spec: CurveSpec
    blocked: FrozenSet[int] = frozenset()
    connectivity: Connectivity = Connectivity.FOUR

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocked", frozenset(self.blocked))
        N = self.spec.num_waypoints
        bad = [d for d in self.blocked if not 0 <= d < N]
        if bad:
            raise ValueError(f"blocked waypoints out of range 0..{N - 1}: {sorted(bad)[:5]}")

    def is_blocked(self, d: int) -> bool:
        return d in self.blocked

    def adjacent(self, a: int, b: int) -> bool:
        (ax, ay) = index_to_cell(self.spec, a)
        (bx, by) = index_to_cell(self.spec, b)
        dx, dy = abs(ax - bx), abs(ay - by)
        if self.connectivity is Connectivity.FOUR:
            return dx + dy == 1
        return max(dx, dy) == 1

    def sense(self, at: int, target: int) -> bool:
        return sense(self, at, target)


class SensingError(ValueError):
    pass


def sense(world: WorldOracle, at: int, target: int) -> bool:
    """True when ``target`` is blocked; only neighbouring cells can be sensed."""
    if at in world.blocked:
        raise SensingError(f"sensing from blocked waypoint {at}")
    if not world.adjacent(at, target):
        raise SensingError(
            f"waypoint {target} is not adjacent to {at} "
            f"({world.connectivity.value}-connected); sensor range is one cell"
        )
    return target in world.blocked


def random_obstacle_count(num_waypoints: int, density_percent: float) -> int:
    """``round(density * N / 100)`` with halves rounded up."""
    return int(math.floor(density_percent * num_waypoints / 100.0 + 0.5))


def random_blocked_set(
    spec: CurveSpec, density_percent: float, seed: int, start: Optional[int] = 0
) -> FrozenSet[int]:
    """Distinct waypoints drawn uniformly without replacement, ``start`` excluded.

    Candidates are listed in ascending index order and the first ``count``
    positions of a Fisher-Yates shuffle driven by :class:`Pcg32` are kept.
    """
    if not 0 <= density_percent < 100:
        raise ValueError(f"density_percent must be in [0, 100), got {density_percent}")
    N = spec.num_waypoints
    count = random_obstacle_count(N, density_percent)
    pool = [d for d in range(N) if d != start]
    if count > len(pool):
        raise ValueError(f"cannot block {count} of {N} waypoints with the start kept free")
    rng = Pcg32(seed)
    for i in range(count):
        j = i + rng.bounded(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]
    return frozenset(pool[:count])


def make_random_world(
    spec: CurveSpec,
    density_percent: float,
    seed: int,
    start: Optional[int] = 0,
    connectivity: Connectivity = Connectivity.FOUR,
) -> WorldOracle:
    return WorldOracle(spec, random_blocked_set(spec, density_percent, seed, start), connectivity)


@dataclass(frozen=True)
class ObstacleField:
    """Obstacles as geometry in region coordinates.

    Rasterizing marks every cell whose interior overlaps an obstacle with
    positive area.  Cells given at one iteration are stored as squares, so
    the same field can be re-rasterized at a finer iteration.
    """

    rects: Tuple[Rect, ...] = ()
    polygons: Tuple[Tuple[Tuple[float, float], ...], ...] = field(default=())

    @classmethod
    def from_cells(cls, spec: CurveSpec, cells: Iterable[Cell]) -> "ObstacleField":
        return cls(rects=tuple(spec.cell_bounds(c) for c in sorted(set(cells))))

    @classmethod
    def from_indices(cls, spec: CurveSpec, indices: Iterable[int]) -> "ObstacleField":
        return cls.from_cells(spec, (index_to_cell(spec, d) for d in indices))

    def is_empty(self) -> bool:
        return not self.rects and not self.polygons

    def rasterize(self, spec: CurveSpec) -> FrozenSet[int]:
        h = spec.cell_side
        eps = 1e-9 * h
        ox, oy = spec.region_origin
        out = set()
        for x0, y0, x1, y1 in self.rects:
            for x, y in _cell_range(spec, (x0, y0, x1, y1)):
                cx0, cy0 = ox + x * h, oy + y * h
                if min(x1, cx0 + h) - max(x0, cx0) > eps and min(y1, cy0 + h) - max(y0, cy0) > eps:
                    out.add(cell_to_index(spec, (x, y)))
        for pts in self.polygons:
            poly = Polygon(pts)
            for x, y in _cell_range(spec, poly.bounds):
                cell_box = box(ox + x * h, oy + y * h, ox + (x + 1) * h, oy + (y + 1) * h)
                if cell_box.intersection(poly).area > eps * h:
                    out.add(cell_to_index(spec, (x, y)))
        return frozenset(out)

    def world(
        self, spec: CurveSpec, connectivity: Connectivity = Connectivity.FOUR
    ) -> WorldOracle:
        return WorldOracle(spec, self.rasterize(spec), connectivity)


def _cell_range(spec: CurveSpec, bounds: Sequence[float]) -> List[Cell]:
    x0, y0, x1, y1 = bounds
    h = spec.cell_side
    ox, oy = spec.region_origin
    n = spec.side_cells
    i0 = max(0, int(math.floor((x0 - ox) / h)) - 1)
    i1 = min(n - 1, int(math.floor((x1 - ox) / h)) + 1)
    j0 = max(0, int(math.floor((y0 - oy) / h)) - 1)
    j1 = min(n - 1, int(math.floor((y1 - oy) / h)) + 1)
    return [(x, y) for x in range(i0, i1 + 1) for y in range(j0, j1 + 1)]
