"""Grid A* comparator with the same turn and leg requirements.

Positions advance by `resolution` along one of `headings` evenly spaced
directions. A heading change of at most floor(alpha / heading step) steps is
allowed once the current straight run is at least ceil(l / resolution) steps
long. Every expansion also tries a straight shot into the target.
"""
import heapq
import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from rcsplan.config import ANGLE_EPS, TURN_SLACK, Settings
from rcsplan.errors import NoPath
from rcsplan.services.geometry import TWO_PI, Point2, direction, turn_angle
from rcsplan.services.occlusion import build_index
from rcsplan.services.planner import PathResult
from rcsplan.services.scene import Scene

logger = logging.getLogger(__name__)

GOAL = -1


@dataclass(frozen=True)
class GridState:
    cell: Tuple[int, int]
    heading: Optional[int]
    steps_since_turn: int


@dataclass
class _Node:
    x: float
    y: float
    heading: Optional[int]
    run: int
    g: float
    parent: Optional[int]


def relative_difference(l_rcs: float, l_astar: float) -> float:
    """Percentage difference between two path lengths, relative to the longer one"""
    if l_rcs <= 0.0 or l_astar <= 0.0:
        raise ValueError("path lengths must be positive")
    return 100.0 * abs(l_rcs - l_astar) / max(l_rcs, l_astar)


def _polyline(nodes: List[_Node], last: int, target: Point2, merged: bool) -> List[Point2]:
    chain = []
    i: Optional[int] = last
    while i is not None:
        chain.append(nodes[i])
        i = nodes[i].parent
    chain.reverse()

    points = [Point2(chain[0].x, chain[0].y)]
    for prev, node in zip(chain[1:], chain[2:]):
        if node.heading != prev.heading:
            points.append(Point2(prev.x, prev.y))
    if not merged and len(chain) > 1:
        points.append(Point2(chain[-1].x, chain[-1].y))
    points.append(target)
    return points


def astar_plan(scene: Scene, resolution: float, headings: int = 72,
               max_expansions: Optional[int] = None, idx=None) -> PathResult:
    """Shortest grid path from scene.source to scene.target; raises NoPath"""
    if resolution <= 0.0:
        raise ValueError("resolution must be positive")
    if headings < 8:
        raise ValueError("at least 8 headings are required")
    if scene.target is None:
        raise ValueError("scene has no target")
    if max_expansions is None:
        max_expansions = Settings.from_env().astar_max_expansions
    if idx is None:
        idx = build_index(scene.segment_set(), scene.regions())

    s, t = scene.source, scene.target
    step = TWO_PI / headings
    max_steps = int(math.floor(scene.alpha / step + 1e-9))
    min_run = int(math.ceil(scene.l / resolution - 1e-9))
    unit = np.column_stack([np.cos(np.arange(headings) * step), np.sin(np.arange(headings) * step)])

    xs = [p.x for ring in scene.obstacles for p in ring] + [s.x, t.x]
    ys = [p.y for ring in scene.obstacles for p in ring] + [s.y, t.y]
    pad = 2.0 * scene.l + resolution
    lo_x, hi_x = min(xs) - pad, max(xs) + pad
    lo_y, hi_y = min(ys) - pad, max(ys) + pad

    nodes = [_Node(s.x, s.y, None, 0, 0.0, None)]
    goal_parent: Optional[int] = None
    goal_merged = False
    best_goal = math.inf
    closed = set()
    tie = itertools.count()
    queue: List[Tuple[float, int, int]] = [(s.distance(t), next(tie), 0)]
    expansions = 0

    def key(n: _Node) -> GridState:
        return GridState((round(n.x / resolution), round(n.y / resolution)), n.heading, min(n.run, min_run))

    while queue:
        _, _, i = heapq.heappop(queue)
        if i == GOAL:
            path = _polyline(nodes, goal_parent, t, goal_merged)
            length = sum(a.distance(b) for a, b in zip(path, path[1:]))
            logger.info("grid A* found a path after %d expansions: %d legs, length %.6f",
                        expansions, len(path) - 1, length)
            return PathResult(tuple(path), length, ())
        node = nodes[i]
        state = key(node)
        if state in closed:
            continue
        closed.add(state)
        expansions += 1
        if expansions > max_expansions:
            logger.warning("grid A* stopped after %d expansions", max_expansions)
            raise NoPath(f"grid search exceeded {max_expansions} expansions")

        here = Point2(node.x, node.y)
        shot = here.distance(t)
        if shot > 0.0 and node.g + shot < best_goal:
            merged = False
            if node.heading is None:
                ok = shot >= scene.l
            else:
                turn = abs(turn_angle(node.heading * step, direction(here, t)))
                if turn <= ANGLE_EPS:
                    merged = True
                    ok = node.run * resolution + shot >= scene.l
                else:
                    ok = node.run >= min_run and turn <= scene.alpha + TURN_SLACK and shot >= scene.l
            if ok and not idx.blocked(here, t):
                best_goal = node.g + shot
                goal_parent, goal_merged = i, merged
                heapq.heappush(queue, (best_goal, next(tie), GOAL))

        if node.heading is None:
            moves = list(range(headings))
        elif node.run >= min_run:
            moves = [(node.heading + d) % headings for d in range(-max_steps, max_steps + 1)]
        else:
            moves = [node.heading]
        moves = np.asarray(moves, dtype=int)
        ends = np.array([node.x, node.y]) + resolution * unit[moves]
        inside = ((ends[:, 0] >= lo_x) & (ends[:, 0] <= hi_x) & (ends[:, 1] >= lo_y) & (ends[:, 1] <= hi_y))
        starts = np.repeat([[node.x, node.y]], len(moves), axis=0)
        free = inside & ~idx.blocked_legs(starts, ends)

        g = node.g + resolution
        for h, (x, y) in zip(moves[free], ends[free]):
            h = int(h)
            run = node.run + 1 if h == node.heading else 1
            succ = _Node(float(x), float(y), h, run, g, i)
            if key(succ) in closed:
                continue
            nodes.append(succ)
            heapq.heappush(queue, (g + math.hypot(t.x - succ.x, t.y - succ.y), next(tie), len(nodes) - 1))

    logger.debug("grid A* exhausted after %d expansions", expansions)
    raise NoPath("grid search found no path satisfying the requirements")
