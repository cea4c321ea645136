"""Seeded scene generators and the benchmark suites behind `rcsplan bench`.

Every suite is a list of cases; a case is one scene plus the targets to plan
to. RCS times are split into preprocessing (graph + full sweep) and query
time, and the grid A* comparator runs on the same scene and target.
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import shapely
from shapely.geometry import LineString, Point, Polygon

from rcsplan.errors import NoPath
from rcsplan.services.baseline_astar import relative_difference
from rcsplan.services.geometry import Point2
from rcsplan.services.planning import RcsPlanner
from rcsplan.services.scene import Scene

logger = logging.getLogger(__name__)

COLUMNS = [
    "suite", "case", "vertices", "preprocessing_ms", "query_ms", "total_ms",
    "astar_ms", "rcs_length", "astar_length", "relative_difference",
]


@dataclass(frozen=True)
class BenchCase:
    name: str
    scene: Scene
    targets: Tuple[Point2, ...]


def _clear_of(geom, placed: Sequence, keep_out: Sequence[Point2], gap: float) -> bool:
    grown = geom.buffer(gap)
    if any(grown.intersects(Point(p)) for p in keep_out):
        return False
    return not any(grown.intersects(other) for other in placed)


def rod_scene(rng: np.random.Generator, count: int, size: float, l: float, alpha_degrees: float,
              source: Point2, target: Optional[Point2], rod_length: Tuple[float, float] = (0.15, 0.35),
              max_attempts: int = 5000) -> Scene:
    """`count` disjoint rods of random orientation inside a size x size square"""
    keep_out = [source] + ([target] if target is not None else [])
    gap = 0.02 * size
    rods: List[LineString] = []
    attempts = 0
    while len(rods) < count:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError(f"could only place {len(rods)} of {count} rods")
        length = rng.uniform(*rod_length) * size
        theta = rng.uniform(0.0, math.pi)
        cx, cy = rng.uniform(0.1 * size, 0.9 * size, size=2)
        dx, dy = 0.5 * length * math.cos(theta), 0.5 * length * math.sin(theta)
        rod = LineString([(cx - dx, cy - dy), (cx + dx, cy + dy)])
        if _clear_of(rod, rods, keep_out, gap):
            rods.append(rod)
    obstacles = tuple(tuple(Point2(*c) for c in rod.coords) for rod in rods)
    return Scene(obstacles, source, target, l, math.radians(alpha_degrees)).validate()


def _star_polygon(rng: np.random.Generator, centre, radius: float, n: int) -> Polygon:
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=n))
    radii = rng.uniform(0.55, 1.0, size=n) * radius
    xs = centre[0] + radii * np.cos(angles)
    ys = centre[1] + radii * np.sin(angles)
    return Polygon(np.column_stack([xs, ys]))


def _split_budget(rng: np.random.Generator, budget: int) -> List[int]:
    if budget < 3:
        raise ValueError("a polygon scene needs at least three vertices")
    sizes = []
    remaining = budget
    while remaining > 0:
        n = remaining if remaining <= 8 else int(rng.integers(3, 9))
        if 0 < remaining - n < 3:
            n = remaining - 3
        sizes.append(n)
        remaining -= n
    return sizes


def random_polygon_scene(rng: np.random.Generator, vertices: int, size: float, l: float,
                         alpha_degrees: float, source: Point2, target: Optional[Point2],
                         max_attempts: int = 20000) -> Scene:
    """Disjoint star-shaped polygons with exactly `vertices` vertices in total"""
    sizes = _split_budget(rng, vertices)
    keep_out = [source] + ([target] if target is not None else [])
    gap = 0.01 * size
    radius = 0.35 * size / math.sqrt(len(sizes))
    placed: List[Polygon] = []
    attempts = 0
    for n in sizes:
        while True:
            attempts += 1
            if attempts > max_attempts:
                raise RuntimeError(f"could only place {len(placed)} of {len(sizes)} polygons")
            if attempts % 200 == 0:
                radius *= 0.9
            centre = rng.uniform(radius, size - radius, size=2)
            poly = _star_polygon(rng, centre, radius, n)
            if not poly.is_valid or poly.area <= 0.0 or len(poly.exterior.coords) != n + 1:
                continue
            if _clear_of(poly, placed, keep_out, gap):
                placed.append(poly)
                break
    obstacles = tuple(tuple(Point2(*c) for c in list(shapely.get_coordinates(p.exterior))[:-1]) for p in placed)
    logger.debug("placed %d polygons with %d vertices", len(placed), vertices)
    return Scene(obstacles, source, target, l, math.radians(alpha_degrees)).validate()


def free_points(rng: np.random.Generator, scene: Scene, count: int, size: float) -> Tuple[Point2, ...]:
    """Random points outside every obstacle"""
    geoms = scene.geometries()
    found: List[Point2] = []
    while len(found) < count:
        x, y = rng.uniform(0.05 * size, 0.95 * size, size=2)
        p = Point2(float(x), float(y))
        if all(not g.buffer(0.01 * size).intersects(Point(p)) for g in geoms):
            found.append(p)
    return tuple(found)


def multi_target_cases(rng):
    size = 400.0
    s = Point2(20.0, 20.0)
    scene = random_polygon_scene(rng, 39, size, 30.0, 20.0, s, None)
    return [BenchCase("39 vertices", scene, free_points(rng, scene, 5, size))]


def alpha_sweep_cases(rng):
    s, t = Point2(0.0, 200.0), Point2(400.0, 200.0)
    obstacles = ((Point2(200.0, 170.0), Point2(200.0, 230.0)),)
    return [BenchCase(f"alpha={a}", Scene(obstacles, s, None, 50.0, math.radians(a)), (t,))
            for a in (80, 40, 20, 10)]


def leg_sweep_cases(rng):
    s, t = Point2(10.0, 10.0), Point2(190.0, 190.0)
    base = rod_scene(rng, 3, 200.0, 40.0, 30.0, s, t)
    return [BenchCase(f"l={l}", Scene(base.obstacles, s, None, float(l), base.alpha), (t,))
            for l in (40, 20, 10, 5)]


def obstacle_doubling_cases(rng):
    s, t = Point2(10.0, 10.0), Point2(390.0, 390.0)
    return [BenchCase(f"rods={n}", rod_scene(rng, n, 400.0, 20.0, 30.0, s, t, (0.05, 0.15)).without_target(), (t,))
            for n in (2, 4, 8, 16, 32)]


def scene_rescale_cases(rng):
    s, t = Point2(5.0, 5.0), Point2(95.0, 95.0)
    base = rod_scene(rng, 3, 100.0, 10.0, 30.0, s, t).without_target()
    cases = []
    for factor in (1, 2, 4, 8):
        scaled = base.scaled(float(factor))
        cases.append(BenchCase(f"size={100 * factor}", scaled, (Point2(t.x * factor, t.y * factor),)))
    return cases


def path_length_cases(rng):
    s = Point2(0.0, 0.0)
    return [BenchCase(f"distance={d}", Scene((), s, None, 50.0, math.radians(30.0)), (Point2(float(d), 0.0),))
            for d in (100, 200, 400, 800)]


def scalability_cases(rng):
    cases = []
    for n in (3, 7, 39, 100, 200, 300, 500):
        size = 400.0 * max(1.0, math.sqrt(n / 39.0))
        s = Point2(0.02 * size, 0.02 * size)
        t = Point2(0.98 * size, 0.98 * size)
        cases.append(BenchCase(f"vertices={n}", random_polygon_scene(rng, n, size, 60.0, 20.0, s, t).without_target(),
                               (t,)))
    return cases


SUITES: Dict[str, Tuple[Callable[[np.random.Generator], List[BenchCase]], bool]] = {
    "multi-target": (multi_target_cases, True),
    "alpha-sweep": (alpha_sweep_cases, True),
    "leg-sweep": (leg_sweep_cases, True),
    "obstacle-doubling": (obstacle_doubling_cases, True),
    "scene-rescale": (scene_rescale_cases, True),
    "path-length": (path_length_cases, True),
    "scalability": (scalability_cases, False),
}


def _ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def run_case(suite: str, case: BenchCase, astar: bool, timings: bool) -> List[dict]:
    rows = []
    planner = RcsPlanner(case.scene)
    start = time.perf_counter()
    planner.preprocess()
    pre_ms = _ms(start)
    for i, t in enumerate(case.targets):
        label = case.name if len(case.targets) == 1 else f"{case.name} target {i}"
        start = time.perf_counter()
        try:
            rcs_length = planner.query(t).length
        except NoPath:
            rcs_length = math.nan
        query_ms = _ms(start)

        astar_ms, astar_length = math.nan, math.nan
        if astar:
            start = time.perf_counter()
            try:
                astar_length = planner.astar(t).length
            except NoPath:
                pass
            astar_ms = _ms(start)

        diff = math.nan
        if math.isfinite(rcs_length) and math.isfinite(astar_length):
            diff = relative_difference(rcs_length, astar_length)
        rows.append({
            "suite": suite,
            "case": label,
            "vertices": case.scene.vertex_count,
            "preprocessing_ms": pre_ms if timings else math.nan,
            "query_ms": query_ms if timings else math.nan,
            "total_ms": pre_ms + query_ms if timings else math.nan,
            "astar_ms": astar_ms if timings else math.nan,
            "rcs_length": rcs_length,
            "astar_length": astar_length,
            "relative_difference": diff,
        })
        logger.info("%s / %s: rcs %.4f, astar %.4f", suite, label, rcs_length, astar_length)
    return rows


def run_suite(name: str, seed: int, astar: bool = True, timings: bool = True) -> pd.DataFrame:
    """Run one named suite; the same seed always generates the same scenes"""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    make_cases, with_astar = SUITES[name]
    rng = np.random.default_rng(seed)
    rows = []
    for case in make_cases(rng):
        rows.extend(run_case(name, case, astar and with_astar, timings))
    return pd.DataFrame(rows, columns=COLUMNS)
