"""Online obstacle evasion along a space-filling curve.

The agent keeps a visited set ``V`` and a detected-obstacle set ``O``.  Each
step it targets the lowest-numbered unvisited, non-obstacle waypoint adjacent
to ``V``, walks there through visited cells, and checks the target from the
cell just before it.  A blocked target goes into ``O`` and the agent stays put;
a free one is entered and added to ``V``.
"""
from __future__ import annotations

import enum
import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import AbstractSet, Callable, Dict, FrozenSet, List, Optional, Set

from .events import Abort, Event, Move, Sense, Terminate, Visit
from .graph import WaypointGraph, frontier

SenseFn = Callable[[int, int], bool]

TERMINATED_REASON = "all reachable waypoints visited"


class Status(enum.Enum):
    RUNNING = "running"
    TERMINATED = "terminated"


class PlannerError(RuntimeError):
    """Raised when a planner invariant is violated."""


def select_target(G: WaypointGraph, V: AbstractSet[int], O: AbstractSet[int]) -> Optional[int]:
    """Minimum of the frontier, or ``None`` once nothing is left to visit."""
    candidates = frontier(G, V, O)
    return candidates[0] if candidates else None


def shortest_route(G: WaypointGraph, V: AbstractSet[int], c: int, p: int) -> List[int]:
    """Fewest-hop route from ``c`` to ``p`` whose interior lies in ``V``.

    Among routes of equal length the lexicographically smallest waypoint
    sequence is returned.

    Raises:
      PlannerError: if no such route exists.
    """
    if c == p:
        return [c]
    if c not in V:
        raise PlannerError(f"route start {c} is not a visited waypoint")
    if p in G.neighbors(c):
        return [c, p]
    # distances measured from p, so a greedy walk from c can pick the
    # smallest neighbour one step closer at every hop
    dist: Dict[int, int] = {p: 0}
    queue = deque([p])
    found = False
    while queue and not found:
        v = queue.popleft()
        for u in G.neighbors(v):
            if u in dist or u not in V:
                continue
            dist[u] = dist[v] + 1
            if u == c:
                found = True
                break
            queue.append(u)
    if not found:
        raise PlannerError(f"no route from {c} to {p} through visited waypoints")
    route = [c]
    cur = c
    while cur != p:
        want = dist[cur] - 1
        cur = min(u for u in G.neighbors(cur) if dist.get(u) == want)
        route.append(cur)
    return route


@dataclass(frozen=True)
class ConfinementReport:
    """Whether part of the region may be sealed off at this resolution.

    ``paper_flag`` is ``n(V) + n(O) < c_prime`` taken literally; since
    indices start at 0 it can miss a single absent waypoint, so the exact
    set of absent indices up to ``c_prime`` is reported alongside it.
    """

    paper_flag: bool
    missing_below_max: FrozenSet[int]
    c_prime: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "paper_flag": self.paper_flag,
            "missing_below_max": sorted(self.missing_below_max),
            "c_prime": self.c_prime,
        }


def confinement_check(
    V: AbstractSet[int], O: AbstractSet[int], c_prime: Optional[int] = None
) -> ConfinementReport:
    if c_prime is None:
        c_prime = max(V)
    flag = len(V) + len(O) < c_prime
    missing = frozenset(d for d in range(c_prime + 1) if d not in V and d not in O)
    return ConfinementReport(flag, missing, c_prime)


@dataclass
class PlannerState:
    """Mutable state of one mission.

    ``route`` holds the route of the step in progress and is empty between
    steps; ``last_route`` keeps the route of the most recent step.  The
    frontier is tracked incrementally with a lazy min-heap.
    """

    graph: WaypointGraph
    current: int = 0
    V: Set[int] = field(default_factory=set)
    O: Set[int] = field(default_factory=set)
    route: List[int] = field(default_factory=list)
    last_route: List[int] = field(default_factory=list)
    status: Status = Status.RUNNING
    visit_order: List[int] = field(default_factory=list)
    _heap: List[int] = field(default_factory=list, repr=False)
    _queued: Set[int] = field(default_factory=set, repr=False)

    def __post_init__(self) -> None:
        if not 0 <= self.current < len(self.graph):
            raise IndexError(f"start waypoint {self.current} out of range")
        if not self.V:
            self.V = {self.current}
        if self.current not in self.V:
            raise PlannerError("current waypoint must be visited")
        if self.V & self.O:
            raise PlannerError("visited and obstacle sets overlap")
        if not self.visit_order:
            self.visit_order = [self.current]
        for v in sorted(self.V):
            self._push_neighbors(v)
        if self.peek_target() is None:
            self.status = Status.TERMINATED

    @classmethod
    def start(cls, graph: WaypointGraph, start: int = 0) -> "PlannerState":
        return cls(graph=graph, current=start)

    def _push_neighbors(self, v: int) -> None:
        for u in self.graph.neighbors(v):
            if u not in self._queued and u not in self.V:
                self._queued.add(u)
                heapq.heappush(self._heap, u)

    def peek_target(self) -> Optional[int]:
        """Same value as :func:`select_target` on this state."""
        heap = self._heap
        while heap and (heap[0] in self.V or heap[0] in self.O):
            heapq.heappop(heap)
        return heap[0] if heap else None

    def frontier(self) -> List[int]:
        return frontier(self.graph, self.V, self.O)


def planner_step(state: PlannerState, sense: SenseFn) -> List[Event]:
    """Run one selection-route-sense cycle and return the events it produced.

    Each call grows ``|V| + |O|`` by exactly one.  When the frontier becomes
    empty the state is marked terminated and a ``Terminate`` event closes
    the list.
    """
    if state.status is not Status.RUNNING:
        raise PlannerError("planner_step called on a terminated mission")
    G = state.graph
    p = state.peek_target()
    if p is None:
        state.status = Status.TERMINATED
        state.last_route = []
        return [Terminate(TERMINATED_REASON)]
    if p in state.O:
        raise PlannerError(f"target {p} is already a known obstacle")

    events: List[Event] = []
    route = shortest_route(G, state.V, state.current, p)
    state.route = route
    for a, b in zip(route[:-2], route[1:-1]):
        events.append(Move(a, b))
        state.current = b

    at = route[-2]
    if not G.are_adjacent(at, p):
        raise PlannerError(f"sense query between non-adjacent waypoints {at} and {p}")
    blocked = bool(sense(at, p))
    events.append(Sense(at, p, blocked))
    if blocked:
        state.O.add(p)
        events.append(Abort(p))
    else:
        events.append(Move(at, p))
        state.current = p
        state.V.add(p)
        state.visit_order.append(p)
        state._push_neighbors(p)
        events.append(Visit(p))
    state.last_route = route
    state.route = []

    if state.peek_target() is None:
        state.status = Status.TERMINATED
        events.append(Terminate(TERMINATED_REASON))
    return events


def run_planner(state: PlannerState, sense: SenseFn) -> List[Event]:
    """Step until termination; returns all events."""
    events: List[Event] = []
    if state.status is Status.TERMINATED:
        return [Terminate(TERMINATED_REASON)]
    while state.status is Status.RUNNING:
        events.extend(planner_step(state, sense))
    return events
