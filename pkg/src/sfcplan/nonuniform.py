"""Composite regions: sub-squares covered one after another, each at its own iteration.

When the agent finishes a sub-square at waypoint ``A`` it walks, through
cells it has visited, to the visited cell ``B`` on the shared boundary that
is nearest to ``A``.  It then crosses into the nearest cell ``C`` of the
next sub-square, checking ``C`` first, and starts a fresh mission there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .curve import CurveSpec, index_to_cell, waypoint_position
from .graph import Connectivity, build_waypoint_graph
from .planner import shortest_route
from .simulator import MissionTrace, ScenarioConfig, run_mission
from .world import WorldOracle

Segment = Tuple[Tuple[float, float], Tuple[float, float]]

_EPS = 1e-9


class TransitionError(RuntimeError):
    """Raised when the agent cannot cross into the next sub-square."""

    def __init__(self, record: "Transition"):
        super().__init__(f"{record.from_region} -> {record.to_region}: {record.skipped_reason}")
        self.record = record


@dataclass(frozen=True)
class Subregion:
    id: str
    spec: CurveSpec

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        ox, oy = self.spec.region_origin
        return ox, oy, ox + self.spec.region_side, oy + self.spec.region_side


def shared_edge(a: Subregion, b: Subregion) -> Optional[Segment]:
    """Boundary segment of positive length shared by two squares, else ``None``."""
    ax0, ay0, ax1, ay1 = a.bounds
    bx0, by0, bx1, by1 = b.bounds
    tol = _EPS * max(a.spec.region_side, b.spec.region_side)
    for x_a, x_b in ((ax1, bx0), (ax0, bx1)):
        if abs(x_a - x_b) <= tol:
            lo, hi = max(ay0, by0), min(ay1, by1)
            if hi - lo > tol:
                return (x_a, lo), (x_a, hi)
    for y_a, y_b in ((ay1, by0), (ay0, by1)):
        if abs(y_a - y_b) <= tol:
            lo, hi = max(ax0, bx0), min(ax1, bx1)
            if hi - lo > tol:
                return (lo, y_a), (hi, y_a)
    return None


def _overlaps(x0: float, x1: float, lo: float, hi: float, tol: float) -> bool:
    return min(x1, hi) - max(x0, lo) > tol


def edge_waypoints(spec: CurveSpec, edge: Segment) -> List[int]:
    """Waypoints whose cell has a side lying along ``edge``, ascending."""
    (ex0, ey0), (ex1, ey1) = edge
    h = spec.cell_side
    tol = _EPS * h
    out = []
    for d in range(spec.num_waypoints):
        x, y = index_to_cell(spec, d)
        cx0, cy0, cx1, cy1 = spec.cell_bounds((x, y))
        if abs(ex0 - ex1) <= tol:  # vertical edge
            on_line = abs(cx0 - ex0) <= tol or abs(cx1 - ex0) <= tol
            if on_line and _overlaps(cy0, cy1, min(ey0, ey1), max(ey0, ey1), tol):
                out.append(d)
        else:
            on_line = abs(cy0 - ey0) <= tol or abs(cy1 - ey0) <= tol
            if on_line and _overlaps(cx0, cx1, min(ex0, ex1), max(ex0, ex1), tol):
                out.append(d)
    return out


def _nearest_first(spec: CurveSpec, candidates: Sequence[int], point: Tuple[float, float]) -> List[int]:
    def key(d: int) -> Tuple[float, int]:
        px, py = waypoint_position(spec, d)
        return math.hypot(px - point[0], py - point[1]), d

    return sorted(candidates, key=key)


@dataclass
class Transition:
    from_region: str
    to_region: str
    A: int
    B: Optional[int] = None
    route: List[int] = field(default_factory=list)
    C: Optional[int] = None
    rejected: List[int] = field(default_factory=list)
    skipped_reason: Optional[str] = None

    def to_dict(self) -> Dict[str, object]:
        return {
            "type": "transition",
            "from_region": self.from_region,
            "to_region": self.to_region,
            "A": self.A,
            "B": self.B,
            "route": list(self.route),
            "C": self.C,
            "rejected": list(self.rejected),
            "skipped_reason": self.skipped_reason,
        }


def transition(
    terminal_A: int,
    cur: Subregion,
    nxt: Subregion,
    cur_trace: MissionTrace,
    next_world: WorldOracle,
) -> Transition:
    """Choose exit ``B`` and entry ``C`` between consecutive sub-squares.

    Ties in distance go to the smaller waypoint index.  Blocked entry
    candidates are recorded in ``rejected`` and the next-nearest one is tried.

    Raises:
      TransitionError: no shared boundary, no visited cell on it, or every
        entry candidate is blocked.  The partially filled record is
        available as ``err.record``.
    """
    rec = Transition(cur.id, nxt.id, terminal_A)
    edge = shared_edge(cur, nxt)
    if edge is None:
        rec.skipped_reason = "no shared boundary"
        raise TransitionError(rec)
    exits = [d for d in edge_waypoints(cur.spec, edge) if d in cur_trace.visited]
    if not exits:
        rec.skipped_reason = "no visited cell on the shared boundary"
        raise TransitionError(rec)
    a_pos = waypoint_position(cur.spec, terminal_A)
    B = _nearest_first(cur.spec, exits, a_pos)[0]
    rec.B = B
    graph = build_waypoint_graph(cur.spec, cur_trace.connectivity)
    rec.route = shortest_route(graph, cur_trace.visited, terminal_A, B)

    b_pos = waypoint_position(cur.spec, B)
    for C in _nearest_first(nxt.spec, edge_waypoints(nxt.spec, edge), b_pos):
        if next_world.is_blocked(C):
            rec.rejected.append(C)
            continue
        rec.C = C
        return rec
    rec.skipped_reason = "every entry cell on the shared boundary is blocked"
    raise TransitionError(rec)


@dataclass(frozen=True)
class CompositeRegion:
    subregions: Tuple[Subregion, ...]

    def __post_init__(self) -> None:
        subs = tuple(self.subregions)
        object.__setattr__(self, "subregions", subs)
        if not subs:
            raise ValueError("a composite region needs at least one subregion")
        ids = [s.id for s in subs]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate subregion ids: {ids}")
        for i, a in enumerate(subs):
            for b in subs[i + 1:]:
                if _interiors_overlap(a, b):
                    raise ValueError(f"subregions {a.id} and {b.id} overlap")
        for a, b in zip(subs, subs[1:]):
            if shared_edge(a, b) is None:
                raise ValueError(f"consecutive subregions {a.id} and {b.id} share no edge")

    def shared_edges(self) -> List[Segment]:
        return [shared_edge(a, b) for a, b in zip(self.subregions, self.subregions[1:])]  # type: ignore[misc]


def _interiors_overlap(a: Subregion, b: Subregion) -> bool:
    ax0, ay0, ax1, ay1 = a.bounds
    bx0, by0, bx1, by1 = b.bounds
    tol = _EPS * max(a.spec.region_side, b.spec.region_side)
    return min(ax1, bx1) - max(ax0, bx0) > tol and min(ay1, by1) - max(ay0, by0) > tol


@dataclass
class CompositeResult:
    traces: Dict[str, MissionTrace]
    transitions: List[Transition]
    skipped: Dict[str, str]
    # entry waypoint of every covered subregion
    entries: Dict[str, int]

    @property
    def order(self) -> List[str]:
        return list(self.traces)


def run_composite_mission(
    region: CompositeRegion,
    worlds: Mapping[str, WorldOracle],
    connectivity: Connectivity = Connectivity.FOUR,
    start: int = 0,
) -> CompositeResult:
    """Cover each subregion in order, crossing between them at shared edges.

    A subregion that cannot be entered from the last covered one is skipped
    and the following subregion is attempted from that same one.
    """
    subs = region.subregions
    first = subs[0]
    traces: Dict[str, MissionTrace] = {}
    entries: Dict[str, int] = {}
    transitions: List[Transition] = []
    skipped: Dict[str, str] = {}

    traces[first.id] = run_mission(
        ScenarioConfig(first.spec, connectivity, start), worlds[first.id]
    )
    entries[first.id] = start
    last = first
    for nxt in subs[1:]:
        cur_trace = traces[last.id]
        try:
            rec = transition(cur_trace.terminal, last, nxt, cur_trace, worlds[nxt.id])
        except TransitionError as err:
            rec = err.record
            transitions.append(rec)
            skipped[nxt.id] = rec.skipped_reason or "transition failed"
            continue
        transitions.append(rec)
        assert rec.C is not None
        traces[nxt.id] = run_mission(
            ScenarioConfig(nxt.spec, connectivity, rec.C),
            worlds[nxt.id],
            known_obstacles=rec.rejected,
        )
        entries[nxt.id] = rec.C
        last = nxt
    return CompositeResult(traces, transitions, skipped, entries)


def quadrant_layout(
    side: float,
    iterations: Sequence[int],
    origin: Tuple[float, float] = (0.0, 0.0),
) -> CompositeRegion:
    """Four quadrants visited top-left, top-right, bottom-right, bottom-left."""
    if len(iterations) != 4:
        raise ValueError("quadrant_layout needs exactly four iterations")
    half = side / 2.0
    ox, oy = origin
    corners = [("TL", (ox, oy + half)), ("TR", (ox + half, oy + half)),
               ("BR", (ox + half, oy)), ("BL", (ox, oy))]
    return CompositeRegion(tuple(
        Subregion(name, CurveSpec(k, corner, half))
        for (name, corner), k in zip(corners, iterations)
    ))

