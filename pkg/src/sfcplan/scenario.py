"""Scenario files: JSON documents describing a region, its curve and its obstacles."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple, Union

import jsonschema

from .curve import MAX_ITERATION, CurveSpec, min_iteration
from .graph import Connectivity
from .nonuniform import CompositeRegion, Subregion
from .simulator import ObstacleSource, RandomObstacles, ScenarioConfig
from .world import ObstacleField, WorldOracle, random_blocked_set

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_CELL = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}
_RECT = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}

_OBSTACLES = {
    "type": "object",
    "properties": {
        "indices": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "cells": {"type": "array", "items": _CELL},
        "random": {
            "type": "object",
            "properties": {
                "density_percent": {"type": "number", "minimum": 0, "exclusiveMaximum": 100},
                "seed": {"type": "integer", "minimum": 0},
            },
            "required": ["density_percent", "seed"],
            "additionalProperties": False,
        },
        "shapes": {
            "type": "object",
            "properties": {
                "rects": {"type": "array", "items": _RECT},
                "polygons": {"type": "array", "items": {"type": "array", "items": _POINT, "minItems": 3}},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
    "minProperties": 1,
    "maxProperties": 1,
}

SCENARIO_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "region": {
            "type": "object",
            "properties": {"origin": _POINT, "side": {"type": "number", "exclusiveMinimum": 0}},
            "required": ["side"],
            "additionalProperties": False,
        },
        "iteration": {"type": "integer", "minimum": 1, "maximum": MAX_ITERATION},
        "sensing_radius": {"type": "number", "exclusiveMinimum": 0},
        "connectivity": {"enum": ["four", "eight"]},
        "start": {"type": "integer", "minimum": 0},
        "obstacles": _OBSTACLES,
        "composite": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "id": {"type": "string"},
                    "origin": _POINT,
                    "side": {"type": "number", "exclusiveMinimum": 0},
                    "iteration": {"type": "integer", "minimum": 1, "maximum": MAX_ITERATION},
                    "obstacles": _OBSTACLES,
                },
                "required": ["origin", "side", "iteration"],
                "additionalProperties": False,
            },
        },
        "auto_refine_on_confinement": {"type": "boolean"},
    },
    "additionalProperties": False,
}


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario file."""


@dataclass(frozen=True)
class CompositePart:
    subregion: Subregion
    obstacles: Optional[ObstacleSource]


def _fail(path: str, where: str, msg: str) -> ScenarioError:
    return ScenarioError(f"{path}: {where}: {msg}")


def _pointer(err: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in err.absolute_path]
    return "/" + "/".join(parts) if parts else "<root>"


def load_document(path: Union[str, os.PathLike]) -> Dict[str, Any]:
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ScenarioError(f"{path}: cannot read scenario: {e.strerror}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise _fail(path, f"line {e.lineno} column {e.colno}", e.msg) from e
    validator = jsonschema.Draft7Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise _fail(path, f"field {_pointer(err)}", err.message)
    return doc


def _obstacle_source(
    block: Optional[Dict[str, Any]], spec: CurveSpec, path: str, where: str
) -> Optional[ObstacleSource]:
    if not block:
        return None
    N = spec.num_waypoints
    n = spec.side_cells
    if "indices" in block:
        bad = [d for d in block["indices"] if d >= N]
        if bad:
            raise _fail(path, f"field {where}/indices", f"indices {bad} out of range 0..{N - 1}")
        return ObstacleField.from_indices(spec, block["indices"])
    if "cells" in block:
        bad = [c for c in block["cells"] if c[0] >= n or c[1] >= n]
        if bad:
            raise _fail(path, f"field {where}/cells", f"cells {bad} outside the {n}x{n} grid")
        return ObstacleField.from_cells(spec, (tuple(c) for c in block["cells"]))
    if "random" in block:
        r = block["random"]
        return RandomObstacles(float(r["density_percent"]), int(r["seed"]))
    shapes = block["shapes"]
    return ObstacleField(
        rects=tuple(_rect(r, path, where) for r in shapes.get("rects", [])),
        polygons=tuple(tuple((float(x), float(y)) for x, y in poly) for poly in shapes.get("polygons", [])),
    )


def _rect(r: List[float], path: str, where: str) -> Tuple[float, float, float, float]:
    x0, y0, x1, y1 = (float(v) for v in r)
    if not (x1 > x0 and y1 > y0):
        raise _fail(path, f"field {where}/shapes/rects", f"rectangle {r} must have x1 > x0 and y1 > y0")
    return x0, y0, x1, y1


def parse_document(doc: Dict[str, Any], path: str = "<scenario>") -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from an already schema-valid document."""
    region = doc.get("region", {"side": 1.0})
    origin = tuple(region.get("origin", (0.0, 0.0)))
    side = float(region["side"])
    connectivity = Connectivity(doc.get("connectivity", "four"))
    composite_doc = doc.get("composite")

    has_iter, has_radius = "iteration" in doc, "sensing_radius" in doc
    if has_iter and has_radius:
        raise _fail(path, "fields /iteration, /sensing_radius", "give exactly one, not both")
    if not (has_iter or has_radius) and composite_doc is None:
        raise _fail(path, "<root>", "one of 'iteration' or 'sensing_radius' is required")
    radius = float(doc["sensing_radius"]) if has_radius else None
    if has_iter:
        k = int(doc["iteration"])
    elif radius is not None:
        try:
            k = min_iteration(side * side, radius)
        except ValueError as e:
            if "exceeds the cap" in str(e):
                raise _fail(path, "field /sensing_radius", str(e)) from e
            k = 1  # sensor covers the whole region
    else:
        k = int(composite_doc[0]["iteration"])
    spec = CurveSpec(k, origin, side)  # type: ignore[arg-type]

    start = int(doc.get("start", 0))
    if composite_doc is None and start >= spec.num_waypoints:
        raise _fail(path, "field /start", f"start {start} out of range 0..{spec.num_waypoints - 1}")

    composite = None
    obstacles: Optional[ObstacleSource]
    if composite_doc is not None:
        top = doc.get("obstacles")
        if top and not ({"shapes", "random"} & set(top)):
            raise _fail(path, "field /obstacles",
                        "with 'composite', top-level obstacles must be 'shapes' or 'random'")
        parts = []
        for i, entry in enumerate(composite_doc):
            sub = Subregion(
                entry.get("id", f"R{i}"),
                CurveSpec(int(entry["iteration"]), tuple(entry["origin"]), float(entry["side"])),  # type: ignore[arg-type]
            )
            parts.append(CompositePart(
                sub, _obstacle_source(entry.get("obstacles"), sub.spec, path, f"/composite/{i}/obstacles")
            ))
        try:
            CompositeRegion(tuple(p.subregion for p in parts))
        except ValueError as e:
            raise _fail(path, "field /composite", str(e)) from e
        if start >= parts[0].subregion.spec.num_waypoints:
            raise _fail(path, "field /start", f"start {start} out of range for the first subregion")
        composite = tuple(parts)
        obstacles = _obstacle_source(top, spec, path, "/obstacles") if top else None
    else:
        obstacles = _obstacle_source(doc.get("obstacles"), spec, path, "/obstacles")

    config = ScenarioConfig(
        spec=spec,
        connectivity=connectivity,
        start=start,
        obstacles=obstacles if obstacles is not None else ObstacleField(),
        composite=composite,
        auto_refine_on_confinement=bool(doc.get("auto_refine_on_confinement", False)),
        sensing_radius=radius,
    )
    if composite is None and start in config.blocked_set():
        raise _fail(path, "field /start", f"start waypoint {start} is blocked")
    return config


def parse_scenario(path: Union[str, os.PathLike]) -> ScenarioConfig:
    """Read, validate and convert a scenario file.

    Raises:
      ScenarioError: unreadable file, malformed JSON (with line and column),
        schema violation (with the offending field), or inconsistent fields.
    """
    return parse_document(load_document(path), os.fspath(path))


def composite_parts(config: ScenarioConfig) -> Tuple[CompositePart, ...]:
    if config.composite is None:
        raise ValueError("scenario has no composite block")
    return config.composite  # type: ignore[return-value]


def composite_worlds(config: ScenarioConfig) -> Dict[str, WorldOracle]:
    """Hidden world of every subregion.

    Top-level shapes are rasterized into each subregion.  A top-level random
    source draws subregion ``i`` with seed ``seed + i``; the first subregion
    keeps its start cell free.
    """
    parts = composite_parts(config)
    top = config.obstacles
    worlds = {}
    for i, part in enumerate(parts):
        spec = part.subregion.spec
        start = config.start if i == 0 else None
        blocked = set()
        for src, seed_offset in ((top, i), (part.obstacles, 0)):
            if src is None:
                continue
            if isinstance(src, RandomObstacles):
                blocked |= random_blocked_set(spec, src.density_percent, src.seed + seed_offset, start)
            else:
                blocked |= src.rasterize(spec)
        if i == 0 and config.start in blocked:
            raise ScenarioError(f"start waypoint {config.start} of the first subregion is blocked")
        worlds[part.subregion.id] = WorldOracle(spec, frozenset(blocked), config.connectivity)
    return worlds

