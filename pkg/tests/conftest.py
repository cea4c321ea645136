import math
from collections import defaultdict

import numpy as np
import pytest

from rcsplan.services.geometry import Point2, vlr
from rcsplan.services.graph import PlannerGraph
from rcsplan.services.scene import Scene
from rcsplan.services.suites import random_polygon_scene, rod_scene


def line_graph_shortest(g: PlannerGraph, theta=None) -> float:
    """Bellman-Ford over edges: an independent check of the edge-keyed Dijkstra"""
    outgoing = defaultdict(list)
    for e in g.edges:
        outgoing[e.head].append(e)
    dist = {e.id: (e.w if e.head == g.source else math.inf) for e in g.edges}
    changed = True
    while changed:
        changed = False
        for e in g.edges:
            d = dist[e.id]
            if not math.isfinite(d) or e.tail in (g.source, g.target):
                continue
            window = vlr(e.chain, e.from_start, g.alpha)
            for f in outgoing[e.tail]:
                if window.contains(f.dep) and d + f.w < dist[f.id]:
                    dist[f.id] = d + f.w
                    changed = True
    arrivals = [dist[e.id] for e in g.edges
                if e.tail == g.target and (theta is None or theta.contains(e.arr))]
    return min(arrivals, default=math.inf)


def random_rod_scene(seed: int, rods: int = 3) -> Scene:
    rng = np.random.default_rng(seed)
    alpha = float(rng.uniform(25.0, 70.0))
    return rod_scene(rng, rods, 100.0, 10.0, alpha, Point2(5.0, 5.0), Point2(95.0, 90.0))


def random_small_scene(seed: int, alpha_degrees: float) -> Scene:
    """At most eight obstacle vertices: rods on even seeds, polygons on odd ones"""
    rng = np.random.default_rng(seed)
    s, t = Point2(5.0, 5.0), Point2(95.0, 90.0)
    if seed % 2 == 0:
        return rod_scene(rng, int(rng.integers(1, 5)), 100.0, 10.0, alpha_degrees, s, t)
    return random_polygon_scene(rng, int(rng.integers(3, 9)), 100.0, 10.0, alpha_degrees, s, t)


@pytest.fixture
def empty_scene() -> Scene:
    return Scene((), Point2(0.0, 0.0), Point2(100.0, 0.0), 50.0, math.radians(30.0))


@pytest.fixture
def rod_wall_scene() -> Scene:
    rod = (Point2(200.0, 120.0), Point2(200.0, 280.0))
    return Scene((rod,), Point2(50.0, 200.0), Point2(350.0, 200.0), 50.0, math.radians(40.0))


@pytest.fixture
def square_scene() -> Scene:
    square = (Point2(40.0, -20.0), Point2(60.0, -20.0), Point2(60.0, 20.0), Point2(40.0, 20.0))
    return Scene((square,), Point2(0.0, 0.0), Point2(100.0, 0.0), 20.0, math.radians(45.0))
