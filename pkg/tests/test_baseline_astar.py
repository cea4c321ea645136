import math

import pytest

from rcsplan.errors import NoPath
from rcsplan.services.baseline_astar import astar_plan, relative_difference
from rcsplan.services.graph import build_graph
from rcsplan.services.occlusion import build_index
from rcsplan.services.planner import check_path, plan
from rcsplan.services.planning import default_resolution


def test_relative_difference():
    assert round(relative_difference(487.6, 470.4), 1) == 3.5
    assert relative_difference(42.0, 42.0) == 0.0
    assert relative_difference(100.0, 50.0) == 50.0
    assert relative_difference(50.0, 100.0) == relative_difference(100.0, 50.0)


def test_relative_difference_needs_positive_lengths():
    with pytest.raises(ValueError):
        relative_difference(0.0, 10.0)


def test_empty_scene_goes_straight(empty_scene):
    p = astar_plan(empty_scene, 5.0)
    assert p.length == pytest.approx(100.0)
    assert len(p.polyline) == 2


def test_path_around_rod_satisfies_requirements(rod_wall_scene):
    p = astar_plan(rod_wall_scene, default_resolution(rod_wall_scene))
    assert check_path(rod_wall_scene, p) == []
    idx = build_index(rod_wall_scene.segment_set(), rod_wall_scene.regions())
    rcs = plan(build_graph(rod_wall_scene, idx)).length
    assert relative_difference(rcs, p.length) <= 15.0


def test_expansion_limit(rod_wall_scene):
    with pytest.raises(NoPath):
        astar_plan(rod_wall_scene, 10.0, max_expansions=1)


def test_argument_checks(empty_scene):
    with pytest.raises(ValueError):
        astar_plan(empty_scene, 0.0)
    with pytest.raises(ValueError):
        astar_plan(empty_scene, 1.0, headings=4)
    with pytest.raises(ValueError):
        astar_plan(empty_scene.without_target(), 1.0)


def test_default_resolution(rod_wall_scene):
    assert default_resolution(rod_wall_scene) == pytest.approx(rod_wall_scene.l / 4.0)
    assert math.isfinite(default_resolution(rod_wall_scene.without_target()))
