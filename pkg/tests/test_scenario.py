import json

import pytest

from sfcplan.graph import Connectivity
from sfcplan.scenario import ScenarioError, composite_worlds, parse_document, parse_scenario
from sfcplan.simulator import RandomObstacles
from sfcplan.world import ObstacleField


def write(tmp_path, doc, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return p


def test_minimal(tmp_path):
    cfg = parse_scenario(write(tmp_path, {"iteration": 2}))
    assert cfg.spec.num_waypoints == 16
    assert cfg.connectivity is Connectivity.FOUR
    assert cfg.start == 0
    assert cfg.blocked_set() == frozenset()


def test_sensing_radius_converts(tmp_path):
    cfg = parse_scenario(write(tmp_path, {"region": {"side": 4}, "sensing_radius": 1}))
    assert cfg.spec.iteration == 4
    assert cfg.sensing_radius == 1


def test_huge_sensor_falls_back_to_one(tmp_path):
    cfg = parse_scenario(write(tmp_path, {"region": {"side": 1}, "sensing_radius": 5}))
    assert cfg.spec.iteration == 1


@pytest.mark.parametrize("doc,needle", [
    ({"iteration": 2, "obstacles": {"indices": [99]}}, "/obstacles/indices"),
    ({"iteration": 2, "sensing_radius": 1}, "exactly one"),
    ({"region": {"side": 2}}, "required"),
    ({"iteration": 2, "connectivity": "six"}, "/connectivity"),
    ({"iteration": 2, "obstacles": {"indices": [1], "cells": [[0, 1]]}}, "/obstacles"),
    ({"iteration": 2, "obstacles": {"cells": [[4, 0]]}}, "/obstacles/cells"),
    ({"iteration": 2, "start": 3, "obstacles": {"indices": [3]}}, "blocked"),
    ({"iteration": 2, "start": 16}, "/start"),
    ({"iteration": 2, "bogus": 1}, "<root>"),
    ({"iteration": 2, "obstacles": {"random": {"density_percent": 100, "seed": 1}}}, "density_percent"),
])
def test_schema_errors(tmp_path, doc, needle):
    with pytest.raises(ScenarioError, match=needle.replace("/", "/")):
        parse_scenario(write(tmp_path, doc))


def test_malformed_json_reports_line(tmp_path):
    with pytest.raises(ScenarioError, match="line 2"):
        parse_scenario(write(tmp_path, '{"iteration": 2,\n  oops}'))


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read"):
        parse_scenario(tmp_path / "nope.json")


def test_obstacle_sources(tmp_path):
    cfg = parse_scenario(write(tmp_path, {"iteration": 2, "obstacles": {"cells": [[1, 0]]}}))
    assert cfg.blocked_set() == {1}
    cfg = parse_scenario(write(tmp_path, {
        "iteration": 2, "obstacles": {"random": {"density_percent": 25, "seed": 4}}}))
    assert cfg.obstacles == RandomObstacles(25.0, 4)
    assert len(cfg.blocked_set()) == 4
    cfg = parse_scenario(write(tmp_path, {
        "region": {"side": 4}, "iteration": 2,
        "obstacles": {"shapes": {"rects": [[1, 1, 2, 2]], "polygons": [[[3, 3], [4, 3], [4, 4]]]}}}))
    assert isinstance(cfg.obstacles, ObstacleField)
    assert cfg.blocked_set() == {2, 10}


def test_composite(tmp_path):
    doc = {
        "region": {"side": 16},
        "composite": [
            {"id": "TL", "origin": [0, 8], "side": 8, "iteration": 4},
            {"id": "TR", "origin": [8, 8], "side": 8, "iteration": 3,
             "obstacles": {"indices": [5]}},
        ],
        "obstacles": {"random": {"density_percent": 10, "seed": 2}},
    }
    cfg = parse_scenario(write(tmp_path, doc))
    worlds = composite_worlds(cfg)
    assert set(worlds) == {"TL", "TR"}
    assert 5 in worlds["TR"].blocked
    assert 0 not in worlds["TL"].blocked
    assert len(worlds["TL"].blocked) == 26


def test_composite_rejects_indices_at_top_level():
    doc = {"composite": [{"origin": [0, 0], "side": 1, "iteration": 1}],
           "obstacles": {"indices": [1]}}
    with pytest.raises(ScenarioError, match="shapes"):
        parse_document(doc)


def test_composite_rejects_disconnected_order():
    doc = {"composite": [{"origin": [0, 0], "side": 1, "iteration": 1},
                         {"origin": [1, 1], "side": 1, "iteration": 1}]}
    with pytest.raises(ScenarioError, match="share no edge"):
        parse_document(doc)
