"""Hilbert-curve tessellation of a square region.

The region is split into ``2**k x 2**k`` square cells and the cells are
numbered ``0 .. 4**k - 1`` along the Hilbert curve of iteration ``k``.
Cell coordinates are ``(column, row)`` with row 0 at the bottom, so the
canonical curve starts in the left-bottom cell and ends in the
right-bottom cell.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Tuple

Cell = Tuple[int, int]
Point = Tuple[float, float]

MAX_ITERATION = 16

# Values of log2(...) closer than this to an integer are snapped to it, so
# that e.g. A = 3*sqrt(2), s = 1 gives exactly k = 1.
_LOG_SNAP = 1e-9


class Orientation(enum.Enum):
    """Dihedral placement of the curve inside its square.

    ``CANONICAL`` starts at (0, 0) and ends at (n-1, 0).  The other members
    are the remaining symmetries of the square applied to the canonical curve.
    """

    CANONICAL = "canonical"
    ROT90 = "rot90"
    ROT180 = "rot180"
    ROT270 = "rot270"
    FLIP_X = "flip_x"
    FLIP_Y = "flip_y"
    TRANSPOSE = "transpose"
    ANTITRANSPOSE = "antitranspose"

    def apply(self, x: int, y: int, n: int) -> Cell:
        m = n - 1
        if self is Orientation.CANONICAL:
            return x, y
        if self is Orientation.ROT90:
            return m - y, x
        if self is Orientation.ROT180:
            return m - x, m - y
        if self is Orientation.ROT270:
            return y, m - x
        if self is Orientation.FLIP_X:
            return m - x, y
        if self is Orientation.FLIP_Y:
            return x, m - y
        if self is Orientation.TRANSPOSE:
            return y, x
        return m - y, m - x

    def invert(self, x: int, y: int, n: int) -> Cell:
        m = n - 1
        if self is Orientation.ROT90:
            return y, m - x
        if self is Orientation.ROT270:
            return m - y, x
        # every other member is an involution
        return self.apply(x, y, n)


@dataclass(frozen=True)
class CurveSpec:
    """Iteration and placement of one Hilbert tessellation."""

    iteration: int
    region_origin: Point = (0.0, 0.0)
    region_side: float = 1.0
    orientation: Orientation = Orientation.CANONICAL

    def __post_init__(self) -> None:
        if not isinstance(self.iteration, int) or isinstance(self.iteration, bool):
            raise TypeError(f"iteration must be an int, got {self.iteration!r}")
        if not 1 <= self.iteration <= MAX_ITERATION:
            raise ValueError(
                f"iteration must be in 1..{MAX_ITERATION}, got {self.iteration}"
            )
        if not self.region_side > 0:
            raise ValueError(f"region_side must be positive, got {self.region_side}")
        object.__setattr__(
            self, "region_origin", (float(self.region_origin[0]), float(self.region_origin[1]))
        )

    @property
    def side_cells(self) -> int:
        """Cells along one side of the square, ``2**k``."""
        return 1 << self.iteration

    @property
    def num_waypoints(self) -> int:
        return 1 << (2 * self.iteration)

    @property
    def cell_side(self) -> float:
        return self.region_side / self.side_cells

    @property
    def area(self) -> float:
        return self.region_side * self.region_side

    def refined(self, extra: int = 1) -> "CurveSpec":
        """Same region and orientation at a higher iteration."""
        return CurveSpec(
            self.iteration + extra, self.region_origin, self.region_side, self.orientation
        )

    def cell_bounds(self, cell: Cell) -> Tuple[float, float, float, float]:
        """``(xmin, ymin, xmax, ymax)`` of a cell in region coordinates."""
        x, y = cell
        ox, oy = self.region_origin
        h = self.cell_side
        return ox + x * h, oy + y * h, ox + (x + 1) * h, oy + (y + 1) * h


def min_iteration(area: float, sensing_radius: float, rule: str = "log") -> int:
    """Smallest curve iteration whose cells the sensor can cover.

    Args:
      area: area ``A`` of the square region.
      sensing_radius: sensor radius ``s``.
      rule: ``"log"`` evaluates ``ceil(log2(A / (s*sqrt(2)) - 1))`` as
        written (it mixes an area with a length).  ``"diagonal"`` returns the
        smallest k whose cell diagonal is at most ``2 * s``.

    Returns:
      The iteration, clamped to at least 1.

    Raises:
      ValueError: on non-positive inputs, or, for the ``"log"`` rule, when
        ``A / (s*sqrt(2)) - 1 <= 0`` (the sensor already covers the region;
        callers may fall back to k = 1).
    """
    if not area > 0 or not sensing_radius > 0:
        raise ValueError("area and sensing_radius must be positive")
    if rule == "log":
        arg = area / (sensing_radius * math.sqrt(2.0)) - 1.0
        if arg <= 0:
            raise ValueError(
                f"log2 undefined: A/(s*sqrt(2)) - 1 = {arg:.6g} <= 0; "
                "the sensing radius already covers the region"
            )
        raw = math.log2(arg)
        nearest = round(raw)
        if abs(raw - nearest) < _LOG_SNAP:
            raw = float(nearest)
        k = max(1, math.ceil(raw))
    elif rule == "diagonal":
        side = math.sqrt(area)
        # cell diagonal side*sqrt(2)/2**k <= 2s  <=>  2**k >= side/(s*sqrt(2))
        need = side / (sensing_radius * math.sqrt(2.0))
        k = 1
        while (1 << k) < need * (1 - 1e-12):
            k += 1
    else:
        raise ValueError(f"unknown rule {rule!r}; expected 'log' or 'diagonal'")
    if k > MAX_ITERATION:
        raise ValueError(f"required iteration {k} exceeds the cap {MAX_ITERATION}")
    return k


def _d2xy(n: int, d: int) -> Cell:
    x = y = 0
    s = 1
    t = d
    while s < n:
        rx = 1 & (t >> 1)
        ry = 1 & (t ^ rx)
        if ry == 0:
            if rx == 1:
                x, y = s - 1 - x, s - 1 - y
            x, y = y, x
        x += s * rx
        y += s * ry
        t >>= 2
        s <<= 1
    return x, y


def _xy2d(n: int, x: int, y: int) -> int:
    d = 0
    s = n >> 1
    while s > 0:
        rx = 1 if x & s else 0
        ry = 1 if y & s else 0
        d += s * s * ((3 * rx) ^ ry)
        if ry == 0:
            if rx == 1:
                x, y = n - 1 - x, n - 1 - y
            x, y = y, x
        s >>= 1
    return d


def index_to_cell(spec: CurveSpec, d: int) -> Cell:
    """Cell ``(x, y)`` holding waypoint ``d``."""
    if not 0 <= d < spec.num_waypoints:
        raise IndexError(f"waypoint index {d} out of range 0..{spec.num_waypoints - 1}")
    n = spec.side_cells
    x, y = _d2xy(n, d)
    return spec.orientation.apply(x, y, n)


def cell_to_index(spec: CurveSpec, cell: Cell) -> int:
    """Waypoint index of cell ``(x, y)``; inverse of :func:`index_to_cell`."""
    x, y = cell
    n = spec.side_cells
    if not (0 <= x < n and 0 <= y < n):
        raise IndexError(f"cell {cell} out of range for a {n}x{n} grid")
    cx, cy = spec.orientation.invert(x, y, n)
    return _xy2d(n, cx, cy)


def waypoint_position(spec: CurveSpec, d: int) -> Point:
    """Centre of the cell holding waypoint ``d``, in region coordinates."""
    x, y = index_to_cell(spec, d)
    ox, oy = spec.region_origin
    h = spec.cell_side
    return ox + h * (x + 0.5), oy + h * (y + 0.5)


def iter_cells(spec: CurveSpec) -> Iterator[Cell]:
    """Cells in curve order."""
    for d in range(spec.num_waypoints):
        yield index_to_cell(spec, d)
