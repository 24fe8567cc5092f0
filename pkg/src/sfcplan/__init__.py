"""Coverage path planning along a Hilbert curve with online obstacle evasion."""
from .curve import (
    CurveSpec,
    Orientation,
    cell_to_index,
    index_to_cell,
    min_iteration,
    waypoint_position,
)
from .graph import Connectivity, WaypointGraph, build_waypoint_graph, frontier, reachable_set
from .planner import (
    ConfinementReport,
    PlannerState,
    confinement_check,
    planner_step,
    select_target,
    shortest_route,
)
from .simulator import MissionTrace, RandomObstacles, ScenarioConfig, run_mission, verify_trace
from .world import ObstacleField, WorldOracle, make_random_world, sense

__version__ = "0.1.0"

__all__ = [
    "ConfinementReport",
    "Connectivity",
    "CurveSpec",
    "MissionTrace",
    "ObstacleField",
    "Orientation",
    "PlannerState",
    "RandomObstacles",
    "ScenarioConfig",
    "WaypointGraph",
    "WorldOracle",
    "build_waypoint_graph",
    "cell_to_index",
    "confinement_check",
    "frontier",
    "index_to_cell",
    "make_random_world",
    "min_iteration",
    "planner_step",
    "reachable_set",
    "run_mission",
    "select_target",
    "sense",
    "shortest_route",
    "verify_trace",
    "waypoint_position",
]
