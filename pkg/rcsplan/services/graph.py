"""Multigraph of valid regular-chain traversals between scene nodes."""
import logging
import math
from bisect import bisect_left, bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from rcsplan.config import ANGLE_EPS, DEGENERATE_EPS
from rcsplan.services.geometry import (
    TWO_PI,
    AngularInterval,
    Point2,
    RegularChain,
    arrival_angle,
    departure_angle,
    enumerate_chains,
    max_turning_points,
    vlr,
)
from rcsplan.services.scene import Scene

logger = logging.getLogger(__name__)

VERTEX, SOURCE, TARGET = "vertex", "source", "target"
# chains checked per occlusion query while building the graph
VALIDATE_BATCH = 2048


@dataclass(frozen=True)
class Node:
    id: int
    point: Point2
    kind: str
    obstacle: Optional[int] = None


@dataclass(eq=False)
class ChainEdge:
    """Directed traversal of a chain from head to tail."""

    id: int
    head: int
    tail: int
    chain: RegularChain
    w: float
    from_start: bool
    dep: float
    arr: float
    dist: float = math.inf
    pred: Optional[int] = None


def make_edge(edge_id: int, head: int, tail: int, chain: RegularChain, from_start: bool) -> ChainEdge:
    return ChainEdge(
        id=edge_id,
        head=head,
        tail=tail,
        chain=chain,
        w=chain.total_length,
        from_start=from_start,
        dep=departure_angle(chain, from_start),
        arr=arrival_angle(chain, from_start),
    )


class AngularEdgeList:
    """Outgoing edges of one node sorted counter-clockwise by departure angle.

    Removal marks a slot dead and links it to its right neighbour; reporting
    walks live slots through path-compressed links, so a range report costs
    two binary searches plus the number of live edges reported.
    """

    def __init__(self, edges: Iterable[ChainEdge]):
        self._edges = sorted(edges, key=lambda e: (e.dep, e.w, e.id))
        self._deps = [e.dep for e in self._edges]
        self._position = {e.id: i for i, e in enumerate(self._edges)}
        self.reset()

    def reset(self) -> None:
        self._next = list(range(len(self._edges) + 1))
        self._alive = len(self._edges)

    def _find(self, i: int) -> int:
        root = i
        while self._next[root] != root:
            root = self._next[root]
        while self._next[i] != root:
            self._next[i], i = root, self._next[i]
        return root

    def __len__(self) -> int:
        return self._alive

    def __iter__(self) -> Iterator[ChainEdge]:
        i = self._find(0)
        while i < len(self._edges):
            yield self._edges[i]
            i = self._find(i + 1)

    def __contains__(self, edge: ChainEdge) -> bool:
        pos = self._position.get(edge.id)
        return pos is not None and self._next[pos] == pos

    def remove(self, edge: ChainEdge) -> bool:
        pos = self._position[edge.id]
        if self._next[pos] != pos:
            return False
        self._next[pos] = pos + 1
        self._alive -= 1
        return True

    def report(self, interval: AngularInterval) -> List[ChainEdge]:
        """Live edges whose departure angle lies in the interval"""
        if interval.is_full:
            return list(self)
        lo = interval.start - ANGLE_EPS
        hi = interval.start + interval.width + ANGLE_EPS
        windows = []
        if lo < 0.0:
            windows.append((lo + TWO_PI, TWO_PI))
            lo = 0.0
        if hi > TWO_PI:
            # wraparound: the interval continues past zero
            windows.append((0.0, hi - TWO_PI))
            hi = TWO_PI
        windows.append((lo, hi))

        seen = set()
        found = []
        for a, b in sorted(windows):
            i = self._find(bisect_left(self._deps, a))
            stop = bisect_right(self._deps, b)
            while i < stop:
                if i not in seen:
                    seen.add(i)
                    edge = self._edges[i]
                    if interval.contains(edge.dep):
                        found.append(edge)
                i = self._find(i + 1)
        return found


class PlannerGraph:
    def __init__(self, nodes: Sequence[Node], edges: Sequence[ChainEdge], alpha: float,
                 l: float, source: int, target: Optional[int] = None):
        self.nodes = list(nodes)
        self.edges = list(edges)
        self.alpha = alpha
        self.l = l
        self.source = source
        self.target = target
        outgoing: List[List[ChainEdge]] = [[] for _ in self.nodes]
        for e in self.edges:
            outgoing[e.head].append(e)
        self.edges_out = [AngularEdgeList(es) for es in outgoing]

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def position(self, node_id: int) -> Point2:
        return self.nodes[node_id].point

    def reset(self) -> None:
        """Restore edges_out and clear dist/pred after a planning run"""
        for e in self.edges:
            e.dist = math.inf
            e.pred = None
        for out in self.edges_out:
            out.reset()


def edge_bound(node_count: int, alpha: float) -> int:
    """Worst-case edge count: two directions per chain, both curvatures per pair"""
    pairs = node_count * (node_count - 1) // 2
    return 2 * pairs * 2 * (max_turning_points(alpha) + 2)


def validate_chains(chains: Sequence[RegularChain], idx) -> np.ndarray:
    """Validity of many chains with one occlusion query over all their legs"""
    if not chains:
        return np.zeros(0, dtype=bool)
    starts, ends, owner = [], [], []
    ignores: List[Tuple[Point2, ...]] = []
    for i, c in enumerate(chains):
        verts = np.asarray(c.vertices, dtype=float)
        legs = len(verts) - 1
        starts.append(verts[:-1])
        ends.append(verts[1:])
        owner.append(np.full(legs, i))
        leg_ignores: List[Tuple[Point2, ...]] = [() for _ in range(legs)]
        leg_ignores[0] = (c.start,)
        leg_ignores[-1] = leg_ignores[-1] + (c.end,)
        ignores.extend(leg_ignores)
    starts, ends, owner = np.concatenate(starts), np.concatenate(ends), np.concatenate(owner)
    bad = idx.blocked_legs(starts, ends, ignores) | idx.interior((starts + ends) / 2.0)
    valid = np.ones(len(chains), dtype=bool)
    valid[owner[bad]] = False
    return valid


def validate_chain(c: RegularChain, idx) -> bool:
    """True iff no leg of the chain is blocked or runs inside an obstacle"""
    return bool(validate_chains([c], idx)[0])


def scene_nodes(scene: Scene) -> Tuple[List[Node], int, Optional[int]]:
    """Obstacle vertices first, then the source and (optionally) the target"""
    nodes = [Node(i, p, VERTEX, obstacle) for i, (p, obstacle) in enumerate(scene.vertices())]
    source = len(nodes)
    nodes.append(Node(source, scene.source, SOURCE))
    target = None
    if scene.target is not None:
        target = len(nodes)
        nodes.append(Node(target, scene.target, TARGET))
    return nodes, source, target


def build_graph(scene: Scene, idx, workers: int = 1) -> PlannerGraph:
    """Add both traversals of every valid chain between every node pair"""
    scene.validate()
    nodes, source, target = scene_nodes(scene)
    count = len(nodes)

    def chains_from(u: int) -> List[Tuple[int, RegularChain]]:
        candidates = []
        a = nodes[u].point
        for v in range(u + 1, count):
            b = nodes[v].point
            if a.distance(b) < DEGENERATE_EPS:
                continue
            candidates.extend((v, chain) for chain in enumerate_chains(a, b, scene.alpha, scene.l))
        found = []
        for lo in range(0, len(candidates), VALIDATE_BATCH):
            batch = candidates[lo:lo + VALIDATE_BATCH]
            valid = validate_chains([chain for _, chain in batch], idx)
            found.extend(item for item, ok in zip(batch, valid) if ok)
        return found

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(chains_from, range(count)))
    else:
        batches = [chains_from(u) for u in range(count)]

    edges: List[ChainEdge] = []
    for u, found in enumerate(batches):
        logger.debug("node %d: %d valid chains", u, len(found))
        for v, chain in found:
            edges.append(make_edge(len(edges), u, v, chain, True))
            edges.append(make_edge(len(edges), v, u, chain, False))

    logger.info("graph built: %d nodes, %d edges (bound %d)", count, len(edges), edge_bound(count, scene.alpha))
    return PlannerGraph(nodes, edges, scene.alpha, scene.l, source, target)


def vs(g: PlannerGraph, e: ChainEdge) -> List[ChainEdge]:
    """Outgoing edges of e.tail still present whose departure lies in vlr(e)"""
    return g.edges_out[e.tail].report(vlr(e.chain, e.from_start, g.alpha))
