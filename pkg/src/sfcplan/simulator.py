"""Mission execution against a hidden world, plus trace checking and serialization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .curve import CurveSpec, cell_to_index, index_to_cell
from .events import Abort, Event, Move, Sense, Terminate, Visit, event_from_dict
from .graph import Connectivity, WaypointGraph, build_waypoint_graph, reachable_set
from .planner import (
    TERMINATED_REASON,
    ConfinementReport,
    PlannerState,
    Status,
    confinement_check,
    planner_step,
)
from .world import ObstacleField, WorldOracle, random_blocked_set


class MissionError(RuntimeError):
    """Raised when a mission cannot start or breaks an invariant."""


@dataclass(frozen=True)
class RandomObstacles:
    density_percent: float
    seed: int


ObstacleSource = Union[ObstacleField, RandomObstacles]


@dataclass(frozen=True)
class ScenarioConfig:
    spec: CurveSpec
    connectivity: Connectivity = Connectivity.FOUR
    start: int = 0
    obstacles: ObstacleSource = field(default_factory=ObstacleField)
    # CompositePart entries when the scenario is a composite region
    composite: Optional[Tuple[Any, ...]] = None
    auto_refine_on_confinement: bool = False
    sensing_radius: Optional[float] = None

    def with_seed(self, seed: int) -> "ScenarioConfig":
        """Copy with the random-obstacle seed replaced; other sources are unchanged."""
        if isinstance(self.obstacles, RandomObstacles):
            return replace(self, obstacles=replace(self.obstacles, seed=seed))
        return self

    def refined(self) -> "ScenarioConfig":
        """The same scenario one iteration finer; obstacles keep their geometry."""
        fine = self.spec.refined()
        obstacles = self.obstacles
        if isinstance(obstacles, RandomObstacles):
            obstacles = ObstacleField.from_indices(self.spec, self.blocked_set())
        start = _refined_start(self.spec, fine, self.start)
        return replace(self, spec=fine, obstacles=obstacles, start=start)

    def blocked_set(self, spec: Optional[CurveSpec] = None) -> FrozenSet[int]:
        spec = spec or self.spec
        if isinstance(self.obstacles, RandomObstacles):
            if spec != self.spec:
                base = random_blocked_set(
                    self.spec, self.obstacles.density_percent, self.obstacles.seed, self.start
                )
                return ObstacleField.from_indices(self.spec, base).rasterize(spec)
            return random_blocked_set(
                spec, self.obstacles.density_percent, self.obstacles.seed, self.start
            )
        return self.obstacles.rasterize(spec)

    def world(self) -> WorldOracle:
        return WorldOracle(self.spec, self.blocked_set(), self.connectivity)


def _refined_start(coarse: CurveSpec, fine: CurveSpec, start: int) -> int:
    # lowest-numbered fine cell inside the coarse start cell
    x, y = index_to_cell(coarse, start)
    return min(
        cell_to_index(fine, (2 * x + dx, 2 * y + dy)) for dx in (0, 1) for dy in (0, 1)
    )


@dataclass(frozen=True)
class MissionMetrics:
    edges_traversed: int
    cells_visited: int
    obstacles_found: int
    revisit_count: int
    edges_on_aborted_routes: int
    confinement: ConfinementReport

    def to_dict(self) -> Dict[str, Any]:
        return {
            "edges_traversed": self.edges_traversed,
            "cells_visited": self.cells_visited,
            "obstacles_found": self.obstacles_found,
            "revisit_count": self.revisit_count,
            "edges_on_aborted_routes": self.edges_on_aborted_routes,
            "confinement": self.confinement.to_dict(),
        }


@dataclass
class MissionTrace:
    spec: CurveSpec
    connectivity: Connectivity
    start: int
    events: List[Event]
    visit_order: List[int]
    visited: FrozenSet[int]
    obstacles: FrozenSet[int]
    metrics: MissionMetrics
    # route of every planner step, in execution order
    routes: List[List[int]] = field(default_factory=list)

    @property
    def terminal(self) -> int:
        """Waypoint where the agent stands at the end of the mission."""
        pos = self.start
        for ev in self.events:
            if isinstance(ev, Move):
                pos = ev.dst
        return pos

    def path(self) -> List[int]:
        """Every waypoint the agent stood on, in order, starting at ``start``."""
        out = [self.start]
        out.extend(ev.dst for ev in self.events if isinstance(ev, Move))
        return out


def run_mission(
    config: ScenarioConfig,
    world: Optional[WorldOracle] = None,
    *,
    graph: Optional[WaypointGraph] = None,
    known_obstacles: Iterable[int] = (),
    check: bool = True,
) -> MissionTrace:
    """Drive the planner from ``config.start`` until nothing reachable is left.

    With ``check`` set, the agent's position is tested against the hidden
    obstacles after every step and the final visited set is compared with a
    breadth-first reachability search; any mismatch raises
    :class:`MissionError`.  ``known_obstacles`` seeds the obstacle set with
    cells detected before the mission started.
    """
    if world is None:
        world = config.world()
    if world.spec != config.spec:
        raise MissionError("world and scenario use different tessellations")
    if graph is None:
        graph = build_waypoint_graph(config.spec, config.connectivity)
    start = config.start
    if not 0 <= start < config.spec.num_waypoints:
        raise MissionError(f"start waypoint {start} out of range")
    if world.is_blocked(start):
        raise MissionError(f"start waypoint {start} is blocked")

    state = PlannerState(graph=graph, current=start, O=set(known_obstacles))
    events: List[Event] = []
    routes: List[List[int]] = []
    revisits = 0
    aborted_edges = 0
    if state.status is Status.TERMINATED:
        events.append(Terminate(TERMINATED_REASON))
    while state.status is Status.RUNNING:
        visited_before = frozenset(state.V) if check else state.V
        step = planner_step(state, world.sense)
        route = state.last_route
        if route:
            routes.append(route)
        moves = [ev for ev in step if isinstance(ev, Move)]
        new_visits = sum(1 for ev in step if isinstance(ev, Visit))
        revisits += len(moves) - new_visits
        if any(isinstance(ev, Abort) for ev in step):
            aborted_edges += len(moves)
        if check:
            for ev in moves:
                if world.is_blocked(ev.dst):
                    raise MissionError(f"agent entered blocked waypoint {ev.dst}")
            stray = [d for d in route[1:-1] if d not in visited_before]
            if stray:
                raise MissionError(f"route {route} passes through unvisited waypoints {stray}")
        events.extend(step)

    V = frozenset(state.V)
    O = frozenset(state.O)
    if check:
        expected = reachable_set(graph, start, world.blocked)
        if V != expected:
            raise MissionError(
                f"visited set differs from reachable set: "
                f"missing {sorted(expected - V)[:10]}, extra {sorted(V - expected)[:10]}"
            )
        stray = O - world.blocked
        if stray:
            raise MissionError(f"free waypoints recorded as obstacles: {sorted(stray)}")

    metrics = MissionMetrics(
        edges_traversed=sum(1 for ev in events if isinstance(ev, Move)),
        cells_visited=sum(1 for ev in events if isinstance(ev, Visit)) + 1,
        obstacles_found=len(O),
        revisit_count=revisits,
        edges_on_aborted_routes=aborted_edges,
        confinement=confinement_check(V, O),
    )
    return MissionTrace(
        spec=config.spec,
        connectivity=config.connectivity,
        start=start,
        events=events,
        visit_order=list(state.visit_order),
        visited=V,
        obstacles=O,
        metrics=metrics,
        routes=routes,
    )


def verify_trace(
    events: Sequence[Event],
    graph: WaypointGraph,
    start: int,
    blocked: Optional[Iterable[int]] = None,
) -> List[str]:
    """Check a trace against the mission invariants; returns the violations found.

    Checked: moves and senses are between adjacent cells and start where the
    agent stands; an unvisited cell is only entered right after sensing it
    free and is then visited; visits are distinct; every abort follows a
    positive sense of the same target; each obstacle is sensed positive once;
    the trace ends with a single terminate.  With ``blocked`` given, moves
    into and sense results about the hidden obstacles are checked too.
    """
    hidden = frozenset(blocked) if blocked is not None else None
    problems: List[str] = []
    pos = start
    visited = {start}
    found: Dict[int, int] = {}
    terminated_at: Optional[int] = None

    for i, ev in enumerate(events):
        prev = events[i - 1] if i > 0 else None
        nxt = events[i + 1] if i + 1 < len(events) else None
        if terminated_at is not None:
            problems.append(f"#{i}: event after terminate")
        if isinstance(ev, Move):
            if ev.src != pos:
                problems.append(f"#{i}: move from {ev.src} but agent is at {pos}")
            if not graph.are_adjacent(ev.src, ev.dst):
                problems.append(f"#{i}: move between non-adjacent {ev.src} and {ev.dst}")
            if hidden is not None and ev.dst in hidden:
                problems.append(f"#{i}: moved into blocked waypoint {ev.dst}")
            if ev.dst not in visited:
                if prev != Sense(ev.src, ev.dst, False):
                    problems.append(f"#{i}: entered unvisited {ev.dst} without sensing it free")
                if nxt != Visit(ev.dst):
                    problems.append(f"#{i}: entered unvisited {ev.dst} without visiting it")
            pos = ev.dst
        elif isinstance(ev, Sense):
            if ev.at != pos:
                problems.append(f"#{i}: sense from {ev.at} but agent is at {pos}")
            if not graph.are_adjacent(ev.at, ev.target):
                problems.append(f"#{i}: sense between non-adjacent {ev.at} and {ev.target}")
            if hidden is not None and ev.blocked != (ev.target in hidden):
                problems.append(f"#{i}: sense of {ev.target} disagrees with the world")
            if ev.blocked:
                found[ev.target] = found.get(ev.target, 0) + 1
        elif isinstance(ev, Abort):
            if not (isinstance(prev, Sense) and prev.target == ev.target and prev.blocked):
                problems.append(f"#{i}: abort of {ev.target} without a positive sense")
        elif isinstance(ev, Visit):
            if ev.waypoint in visited:
                problems.append(f"#{i}: waypoint {ev.waypoint} visited twice")
            if ev.waypoint != pos:
                problems.append(f"#{i}: visit of {ev.waypoint} while agent is at {pos}")
            visited.add(ev.waypoint)
        elif isinstance(ev, Terminate):
            terminated_at = i
        else:
            problems.append(f"#{i}: unknown event {ev!r}")

    for target, count in sorted(found.items()):
        if count != 1:
            problems.append(f"obstacle {target} sensed positive {count} times")
    if terminated_at is None:
        problems.append("trace has no terminate event")
    return problems


def trace_records(events: Iterable[Event], extra: Optional[Dict[str, Any]] = None) -> List[Dict[str, Any]]:
    records = []
    for t, ev in enumerate(events):
        rec: Dict[str, Any] = {"t": t}
        rec.update(ev.to_dict())
        if extra:
            rec.update(extra)
        records.append(rec)
    return records


def dumps_jsonl(records: Iterable[Dict[str, Any]]) -> str:
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records)


def loads_jsonl(text: str) -> List[Event]:
    return [event_from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
