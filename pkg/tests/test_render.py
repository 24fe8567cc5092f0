import xml.etree.ElementTree as ET

from sfcplan.curve import CurveSpec
from sfcplan.graph import Connectivity
from sfcplan.nonuniform import quadrant_layout, run_composite_mission
from sfcplan.render import render_composite_svg, render_svg
from sfcplan.simulator import ScenarioConfig, run_mission
from sfcplan.world import WorldOracle, random_blocked_set

NS = {"s": "http://www.w3.org/2000/svg"}


def parse(svg):
    return ET.fromstring(svg.encode("utf-8"))


def cells(root, cls=None):
    out = root.findall(".//s:rect", NS)
    out = [r for r in out if "cell" in r.get("class", "").split()]
    if cls:
        out = [r for r in out if cls in r.get("class").split()]
    return out


def points(el):
    return el.get("points").split()


def test_empty_k1():
    spec = CurveSpec(1)
    trace = run_mission(ScenarioConfig(spec))
    root = parse(render_svg(trace, WorldOracle(spec, frozenset()), spec))
    assert len(cells(root)) == 4
    path = root.find(".//s:polyline[@class='path']", NS)
    assert len(points(path)) == 4
    assert root.find(".//s:polygon[@class='start-marker']", NS) is not None
    assert root.find(".//s:polygon[@class='terminal-marker']", NS) is not None


def test_dense_fixture_colors_detected_obstacles():
    spec = CurveSpec(3, (0, 0), 8)
    world = WorldOracle(spec, frozenset({22, 23, 24, 25}), Connectivity.EIGHT)
    trace = run_mission(ScenarioConfig(spec, Connectivity.EIGHT), world)
    root = parse(render_svg(trace, world, spec))
    assert len(cells(root)) == 64
    detected = cells(root, "detected-obstacle")
    assert sorted(int(r.get("data-index")) for r in detected) == [22, 23, 24, 25]
    assert all(r.get("fill") == "#8b4513" for r in detected)
    assert not cells(root, "hidden-obstacle")


def test_undetected_obstacles_are_drawn_hidden():
    spec = CurveSpec(2)
    # 1 and 3 wall in the start, so 2 is never sensed
    blocked = frozenset({1, 3, 2})
    world = WorldOracle(spec, blocked)
    trace = run_mission(ScenarioConfig(spec), world)
    root = parse(render_svg(trace, world, spec))
    assert {int(r.get("data-index")) for r in cells(root, "detected-obstacle")} == {1, 3}
    assert {int(r.get("data-index")) for r in cells(root, "hidden-obstacle")} == {2}


def test_without_trace():
    spec = CurveSpec(2)
    root = parse(render_svg(None, None, spec))
    assert len(cells(root)) == 16
    assert root.find(".//s:polyline[@class='path']", NS) is None


def test_composite():
    region = quadrant_layout(16, (4, 3, 1, 2))
    worlds = {
        s.id: WorldOracle(s.spec, random_blocked_set(s.spec, 10, i, 0 if i == 0 else None))
        for i, s in enumerate(region.subregions)
    }
    result = run_composite_mission(region, worlds)
    svg = render_composite_svg(
        [(s.id, s.spec) for s in region.subregions], result.traces, worlds,
        [t.to_dict() for t in result.transitions],
    )
    root = parse(svg)
    groups = root.findall("s:g[@class='subregion']", NS)
    assert [g.get("data-region") for g in groups] == ["TL", "TR", "BR", "BL"]
    assert [len(cells(g)) for g in groups] == [256, 64, 4, 16]
    arrows = root.findall("s:line[@class='transition-arrow']", NS)
    done = [t for t in result.transitions if t.C is not None]
    assert len(arrows) == len(done)
    assert [(a.get("data-from"), a.get("data-to")) for a in arrows] == [
        (t.from_region, t.to_region) for t in done
    ]
