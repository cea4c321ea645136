"""Edge-keyed Dijkstra over the chain graph.

Each edge is settled at most once: when an extracted edge e reaches node v,
every still-present outgoing edge of v inside vlr(e) receives its final
distance dist(e) + w and is removed from Edges(v).
"""
import heapq
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from rcsplan.config import IGNORE_RADIUS, LEG_SLACK, TURN_SLACK
from rcsplan.errors import NoPath
from rcsplan.services.geometry import AngularInterval, Point2, RegularChain, direction, turn_angle
from rcsplan.services.graph import ChainEdge, PlannerGraph, vs
from rcsplan.services.occlusion import LinearScanIndex
from rcsplan.services.scene import Scene

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PathResult:
    polyline: Tuple[Point2, ...]
    length: float
    edge_sequence: Tuple[int, ...]

    @property
    def legs(self) -> List[float]:
        return [a.distance(b) for a, b in zip(self.polyline, self.polyline[1:])]

    @property
    def arrival(self) -> float:
        return direction(self.polyline[-2], self.polyline[-1])


@dataclass
class SearchStats:
    extracted: int = 0
    dists: List[float] = field(default_factory=list)
    insertions: Counter = field(default_factory=Counter)

    @property
    def monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.dists, self.dists[1:]))

    @property
    def max_insertions(self) -> int:
        return max(self.insertions.values(), default=0)


def assemble_path(traversals: Sequence[Tuple[RegularChain, bool]], length: float,
                  edge_ids: Sequence[int]) -> PathResult:
    """Flatten chain traversals into one polyline, merging junction duplicates"""
    points: List[Point2] = []
    for chain, from_start in traversals:
        for p in chain.traversal(from_start):
            if points and points[-1].distance(p) <= IGNORE_RADIUS:
                continue
            points.append(p)
    return PathResult(tuple(points), length, tuple(edge_ids))


def trace(g: PlannerGraph, last: ChainEdge) -> List[ChainEdge]:
    sequence = []
    e: Optional[ChainEdge] = last
    while e is not None:
        sequence.append(e)
        e = None if e.pred is None else g.edges[e.pred]
    return sequence[::-1]


def settle(g: PlannerGraph, s: int, terminal: Optional[int] = None,
           stats: Optional[SearchStats] = None) -> Iterator[ChainEdge]:
    """Yield edges in order of final distance; edges into `terminal` are not expanded"""
    g.reset()
    queue: List[Tuple[float, int]] = []

    def push(e: ChainEdge) -> None:
        heapq.heappush(queue, (e.dist, e.id))
        if stats is not None:
            stats.insertions[e.id] += 1

    for e in list(g.edges_out[s]):
        g.edges_out[s].remove(e)
        e.dist = e.w
        push(e)

    while queue:
        _, edge_id = heapq.heappop(queue)
        e = g.edges[edge_id]
        if stats is not None:
            stats.extracted += 1
            stats.dists.append(e.dist)
        yield e
        if e.tail == terminal:
            continue
        out = g.edges_out[e.tail]
        for nxt in vs(g, e):
            out.remove(nxt)
            nxt.dist = e.dist + nxt.w
            nxt.pred = e.id
            push(nxt)


def _search(g: PlannerGraph, s: Optional[int], t: Optional[int],
            accept: Callable[[ChainEdge], bool], stats: Optional[SearchStats]) -> PathResult:
    s = g.source if s is None else s
    t = g.target if t is None else t
    if t is None:
        raise ValueError("graph has no target node")
    if s == t:
        raise ValueError("source and target nodes coincide")
    for e in settle(g, s, terminal=t, stats=stats):
        if e.tail != t:
            continue
        if not accept(e):
            logger.debug("discarding arrival at %.6f rad via edge %d", e.arr, e.id)
            continue
        sequence = trace(g, e)
        logger.info("path found: %d chains, length %.6f", len(sequence), e.dist)
        return assemble_path([(x.chain, x.from_start) for x in sequence], e.dist, [x.id for x in sequence])
    raise NoPath("no path satisfies the leg-length and turning-angle requirements")


def plan(g: PlannerGraph, s: Optional[int] = None, t: Optional[int] = None,
         stats: Optional[SearchStats] = None) -> PathResult:
    """Shortest requirement-satisfying path made of regular chains"""
    return _search(g, s, t, lambda e: True, stats)


def plan_directional(g: PlannerGraph, s: Optional[int], t: Optional[int], theta: AngularInterval,
                     stats: Optional[SearchStats] = None) -> PathResult:
    """Like plan, but the path must enter t with a direction inside theta"""
    return _search(g, s, t, lambda e: theta.contains(e.arr), stats)


class ViolationKind(str, Enum):
    LEG_TOO_SHORT = "LegTooShort"
    MAX_TURN_EXCEEDED = "MaxTurnExceeded"
    BLOCKED = "Blocked"
    DISCONNECTED = "Disconnected"
    LENGTH_MISMATCH = "LengthMismatch"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    index: int
    detail: str


def check_path(scene: Scene, p: PathResult, leg_slack: float = LEG_SLACK,
               turn_slack: float = TURN_SLACK) -> List[Violation]:
    """Independent verifier of the path requirements"""
    violations: List[Violation] = []
    pts = list(p.polyline)
    if len(pts) < 2:
        return [Violation(ViolationKind.DISCONNECTED, 0, "path has fewer than two points")]
    if pts[0].distance(scene.source) > IGNORE_RADIUS:
        violations.append(Violation(ViolationKind.DISCONNECTED, 0, f"path starts at {pts[0]}, not the source"))
    if scene.target is not None and pts[-1].distance(scene.target) > IGNORE_RADIUS:
        violations.append(Violation(ViolationKind.DISCONNECTED, len(pts) - 1,
                                    f"path ends at {pts[-1]}, not the target"))

    legs = p.legs
    for i, leg in enumerate(legs):
        if leg < scene.l - leg_slack:
            violations.append(Violation(ViolationKind.LEG_TOO_SHORT, i, f"leg {i} has length {leg:.9g} < {scene.l}"))
    for i in range(1, len(pts) - 1):
        if legs[i - 1] == 0.0 or legs[i] == 0.0:
            continue
        turn = abs(turn_angle(direction(pts[i - 1], pts[i]), direction(pts[i], pts[i + 1])))
        if turn > scene.alpha + turn_slack:
            violations.append(Violation(ViolationKind.MAX_TURN_EXCEEDED, i,
                                        f"turn of {math.degrees(turn):.6f} deg at point {i}"))

    reference = LinearScanIndex(scene.segment_set(), scene.regions())
    corners = {p for p, _ in scene.vertices()}
    starts = np.asarray(pts[:-1], dtype=float)
    ends = np.asarray(pts[1:], dtype=float)
    ignores = [tuple(x for x in (a, b) if any(x.distance(c) <= IGNORE_RADIUS for c in corners))
               for a, b in zip(pts, pts[1:])]
    hits = reference.blocked_legs(starts, ends, ignores) | reference.interior((starts + ends) / 2.0)
    for i in np.flatnonzero(hits):
        violations.append(Violation(ViolationKind.BLOCKED, int(i), f"leg {int(i)} meets an obstacle"))

    total = sum(legs)
    if not math.isclose(total, p.length, rel_tol=1e-9, abs_tol=1e-12):
        violations.append(Violation(ViolationKind.LENGTH_MISMATCH, 0,
                                    f"reported length {p.length} but legs sum to {total}"))
    return violations
