"""SVG rendering of tessellations, curves, obstacles and executed paths."""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .curve import CurveSpec, index_to_cell, waypoint_position
from .simulator import MissionTrace
from .world import WorldOracle

SVG_NS = "http://www.w3.org/2000/svg"

FREE_FILL = "#ffffff"
VISITED_FILL = "#eef3f8"
DETECTED_FILL = "#8b4513"
HIDDEN_FILL = "#222222"
CURVE_STROKE = "#b8c4d0"
PATH_STROKE = "#1f3b73"
ARROW_STROKE = "#3fa9f5"


def _num(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


class _Canvas:
    def __init__(self, bounds: Tuple[float, float, float, float], size: float):
        x0, y0, x1, y1 = bounds
        self.x0, self.y1 = x0, y1
        self.scale = size / max(x1 - x0, y1 - y0)
        self.margin = 10.0
        self.width = (x1 - x0) * self.scale + 2 * self.margin
        self.height = (y1 - y0) * self.scale + 2 * self.margin

    def pt(self, x: float, y: float) -> Tuple[float, float]:
        # svg y grows downward
        return (self.margin + (x - self.x0) * self.scale,
                self.margin + (self.y1 - y) * self.scale)

    def points(self, pts: Iterable[Tuple[float, float]]) -> str:
        return " ".join(f"{_num(px)},{_num(py)}" for px, py in (self.pt(x, y) for x, y in pts))


def _root(canvas: _Canvas) -> ET.Element:
    return ET.Element("svg", {
        "xmlns": SVG_NS,
        "width": _num(canvas.width),
        "height": _num(canvas.height),
        "viewBox": f"0 0 {_num(canvas.width)} {_num(canvas.height)}",
    })


def _region_bounds(spec: CurveSpec) -> Tuple[float, float, float, float]:
    ox, oy = spec.region_origin
    return ox, oy, ox + spec.region_side, oy + spec.region_side


def _draw_region(
    parent: ET.Element,
    canvas: _Canvas,
    trace: Optional[MissionTrace],
    world: Optional[WorldOracle],
    spec: CurveSpec,
) -> None:
    detected = trace.obstacles if trace else frozenset()
    visited = trace.visited if trace else frozenset()
    hidden = world.blocked if world else frozenset()
    for d in range(spec.num_waypoints):
        x0, y0, x1, y1 = spec.cell_bounds(index_to_cell(spec, d))
        px, py = canvas.pt(x0, y1)
        if d in detected:
            cls, fill = "cell detected-obstacle", DETECTED_FILL
        elif d in hidden:
            cls, fill = "cell hidden-obstacle", HIDDEN_FILL
        elif d in visited:
            cls, fill = "cell visited", VISITED_FILL
        else:
            cls, fill = "cell", FREE_FILL
        ET.SubElement(parent, "rect", {
            "class": cls,
            "data-index": str(d),
            "x": _num(px),
            "y": _num(py),
            "width": _num((x1 - x0) * canvas.scale),
            "height": _num((y1 - y0) * canvas.scale),
            "fill": fill,
            "stroke": "#cccccc",
            "stroke-width": "0.5",
        })
    curve = [waypoint_position(spec, d) for d in range(spec.num_waypoints)]
    ET.SubElement(parent, "polyline", {
        "class": "curve",
        "points": canvas.points(curve),
        "fill": "none",
        "stroke": CURVE_STROKE,
        "stroke-width": "1",
    })
    if trace is not None:
        path = [waypoint_position(spec, d) for d in trace.path()]
        ET.SubElement(parent, "polyline", {
            "class": "path",
            "points": canvas.points(path),
            "fill": "none",
            "stroke": PATH_STROKE,
            "stroke-width": "2",
        })


def _star(canvas: _Canvas, center: Tuple[float, float], r: float) -> str:
    cx, cy = canvas.pt(*center)
    pts = []
    for i in range(10):
        rad = r if i % 2 == 0 else r * 0.45
        a = -math.pi / 2 + i * math.pi / 5
        pts.append(f"{_num(cx + rad * math.cos(a))},{_num(cy + rad * math.sin(a))}")
    return " ".join(pts)


def _inverted_triangle(canvas: _Canvas, center: Tuple[float, float], r: float) -> str:
    cx, cy = canvas.pt(*center)
    pts = [(cx - r, cy - r * 0.8), (cx + r, cy - r * 0.8), (cx, cy + r)]
    return " ".join(f"{_num(x)},{_num(y)}" for x, y in pts)


def _markers(parent: ET.Element, canvas: _Canvas, start: Tuple[float, float],
             end: Tuple[float, float], r: float) -> None:
    ET.SubElement(parent, "polygon", {
        "class": "start-marker", "points": _star(canvas, start, r), "fill": "#8e44ad",
    })
    ET.SubElement(parent, "polygon", {
        "class": "terminal-marker", "points": _inverted_triangle(canvas, end, r), "fill": "#c0392b",
    })


def _serialize(root: ET.Element) -> str:
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def render_svg(
    trace: Optional[MissionTrace],
    world: Optional[WorldOracle],
    spec: CurveSpec,
    size: float = 512.0,
) -> str:
    """One tessellation with its curve, obstacles, executed path and markers.

    The document holds one ``rect`` per cell, a light ``curve`` polyline,
    a dark ``path`` polyline, a star at the start and an inverted triangle
    at the terminal waypoint.  Without a trace only cells and curve are drawn.
    """
    canvas = _Canvas(_region_bounds(spec), size)
    root = _root(canvas)
    g = ET.SubElement(root, "g", {"class": "grid", "data-iteration": str(spec.iteration)})
    _draw_region(g, canvas, trace, world, spec)
    if trace is not None:
        r = max(4.0, 0.35 * spec.cell_side * canvas.scale)
        _markers(root, canvas, waypoint_position(spec, trace.start),
                 waypoint_position(spec, trace.terminal), min(r, 12.0))
    return _serialize(root)


def render_composite_svg(
    specs: Sequence[Tuple[str, CurveSpec]],
    traces: Mapping[str, MissionTrace],
    worlds: Mapping[str, WorldOracle],
    transitions: Sequence[Mapping[str, object]],
    size: float = 512.0,
) -> str:
    """Composite region: one ``g.subregion`` per sub-square plus transition arrows.

    ``transitions`` are records as produced by ``Transition.to_dict``; each
    completed one is drawn as the walk ``A -> B`` followed by an arrow ``B -> C``.
    """
    xs: List[float] = []
    ys: List[float] = []
    for _, spec in specs:
        x0, y0, x1, y1 = _region_bounds(spec)
        xs += [x0, x1]
        ys += [y0, y1]
    canvas = _Canvas((min(xs), min(ys), max(xs), max(ys)), size)
    root = _root(canvas)
    defs = ET.SubElement(root, "defs")
    marker = ET.SubElement(defs, "marker", {
        "id": "arrow", "viewBox": "0 0 10 10", "refX": "9", "refY": "5",
        "markerWidth": "6", "markerHeight": "6", "orient": "auto-start-reverse",
    })
    ET.SubElement(marker, "path", {"d": "M 0 0 L 10 5 L 0 10 z", "fill": ARROW_STROKE})

    by_id: Dict[str, CurveSpec] = dict(specs)
    for rid, spec in specs:
        g = ET.SubElement(root, "g", {
            "class": "subregion", "data-region": rid, "data-iteration": str(spec.iteration),
        })
        _draw_region(g, canvas, traces.get(rid), worlds.get(rid), spec)

    for rec in transitions:
        if rec.get("C") is None:
            continue
        src, dst = by_id[str(rec["from_region"])], by_id[str(rec["to_region"])]
        route = [waypoint_position(src, int(d)) for d in rec["route"]]  # type: ignore[union-attr]
        if len(route) > 1:
            ET.SubElement(root, "polyline", {
                "class": "transition-route", "points": canvas.points(route),
                "fill": "none", "stroke": ARROW_STROKE, "stroke-width": "2",
            })
        bx, by = canvas.pt(*waypoint_position(src, int(rec["B"])))  # type: ignore[arg-type]
        cx, cy = canvas.pt(*waypoint_position(dst, int(rec["C"])))  # type: ignore[arg-type]
        ET.SubElement(root, "line", {
            "class": "transition-arrow",
            "data-from": str(rec["from_region"]), "data-to": str(rec["to_region"]),
            "x1": _num(bx), "y1": _num(by), "x2": _num(cx), "y2": _num(cy),
            "stroke": ARROW_STROKE, "stroke-width": "2", "marker-end": "url(#arrow)",
        })

    if specs and traces:
        first_id = specs[0][0]
        last_id = list(traces)[-1]
        first_spec, last_spec = by_id[first_id], by_id[last_id]
        r = min(12.0, max(4.0, 0.35 * min(s.cell_side for _, s in specs) * canvas.scale))
        _markers(root, canvas,
                 waypoint_position(first_spec, traces[first_id].start),
                 waypoint_position(last_spec, traces[last_id].terminal), r)
    return _serialize(root)
