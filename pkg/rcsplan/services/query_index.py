"""Preprocess a fixed scene and source once, then answer many target queries.

During one full Dijkstra sweep every extracted edge into v claims the part of
its valid leave range not yet claimed at v. Because edges are extracted by
increasing distance, the claimant of a direction is the cheapest edge that
allows leaving v in that direction.
"""
import hashlib
import json
import logging
import math
from bisect import bisect_right, insort
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from rcsplan.config import ANGLE_EPS, DEGENERATE_EPS
from rcsplan.errors import IndexMismatch, NoPath, TargetInsideObstacle
from rcsplan.services.geometry import (
    TWO_PI,
    AngularInterval,
    Point2,
    arrival_angle,
    build_chain,
    departure_angle,
    enumerate_chains,
    normalize_angle,
    vlr,
)
from rcsplan.services.graph import Node, PlannerGraph, build_graph, make_edge, validate_chain
from rcsplan.services.planner import PathResult, SearchStats, assemble_path, settle, trace
from rcsplan.services.scene import Scene, parse_scene, scene_to_dict

logger = logging.getLogger(__name__)

INDEX_FORMAT = "rcsplan-index"
INDEX_VERSION = 1


@dataclass(frozen=True)
class PredRange:
    interval: AngularInterval
    pred_edge: int
    base_dist: float
    rank: int


class PredList:
    """Disjoint claimed ranges around one node, stored as non-wrapping pieces."""

    def __init__(self):
        self._starts: List[float] = []
        self._pieces: List[Tuple[float, float, PredRange]] = []

    def __len__(self) -> int:
        return len(self.ranges())

    def ranges(self) -> List[PredRange]:
        unique: Dict[int, PredRange] = {}
        for _, _, r in self._pieces:
            unique.setdefault(id(r), r)
        return sorted(unique.values(), key=lambda r: (r.rank, r.interval.start))

    def _overlapping(self, interval: AngularInterval) -> List[AngularInterval]:
        found = []
        for lo, hi in interval.pieces():
            i = max(bisect_right(self._starts, lo) - 1, 0)
            while i < len(self._pieces) and self._pieces[i][0] < hi:
                p_lo, p_hi, _ = self._pieces[i]
                if p_hi > lo:
                    found.append(AngularInterval(p_lo, p_hi - p_lo))
                i += 1
        return found

    def insert(self, interval: AngularInterval, pred_edge: int, base_dist: float, rank: int) -> int:
        """Claim the uncovered part of interval; returns the number of connected pieces"""
        claimed = interval.subtract(self._overlapping(interval))
        for piece in claimed:
            r = PredRange(piece, pred_edge, base_dist, rank)
            for lo, hi in piece.pieces():
                insort(self._pieces, (lo, hi, r), key=lambda item: item[0])
                self._starts = [item[0] for item in self._pieces]
        return len(claimed)

    def lookup(self, angle: float) -> Optional[PredRange]:
        """Earliest claimant whose range contains the direction"""
        angle = normalize_angle(angle)
        best: Optional[PredRange] = None
        for candidate in (angle, angle + TWO_PI, angle - TWO_PI):
            i = bisect_right(self._starts, candidate + ANGLE_EPS) - 1
            while i >= 0:
                lo, hi, r = self._pieces[i]
                if hi < candidate - ANGLE_EPS:
                    break
                if lo - ANGLE_EPS <= candidate and (best is None or r.rank < best.rank):
                    best = r
                i -= 1
        return best


@dataclass
class PlannerIndex:
    graph: PlannerGraph
    preds: Dict[int, PredList]
    scene: Scene
    fingerprint: str
    source: int
    split_ranges: int = 0
    stats: SearchStats = field(default_factory=SearchStats)


def preprocess(scene: Scene, idx, workers: int = 1) -> PlannerIndex:
    """Build the target-free graph and record predecessor ranges per node"""
    scene = scene.without_target()
    graph = build_graph(scene, idx, workers=workers)
    preds = {node.id: PredList() for node in graph.nodes}
    ix = PlannerIndex(graph, preds, scene, scene.fingerprint(), graph.source)

    for rank, e in enumerate(settle(graph, graph.source, terminal=None, stats=ix.stats)):
        if e.tail == graph.source:
            continue
        pieces = preds[e.tail].insert(vlr(e.chain, e.from_start, graph.alpha), e.id, e.dist, rank)
        if pieces > 1:
            ix.split_ranges += 1
            logger.debug("edge %d claims %d separate ranges at node %d", e.id, pieces, e.tail)

    logger.info("preprocessed %d edges, %d ranges, %d split", ix.stats.extracted,
                sum(len(p) for p in preds.values()), ix.split_ranges)
    return ix


def query(ix: PlannerIndex, t: Point2, occl, theta: Optional[AngularInterval] = None) -> PathResult:
    """Best path from the indexed source to t using the stored ranges"""
    t = Point2(*t)
    ix.scene.check_free(t, TargetInsideObstacle, "target")
    g = ix.graph
    best = None
    for node in g.nodes:
        if node.point.distance(t) < DEGENERATE_EPS:
            continue
        for chain in enumerate_chains(node.point, t, g.alpha, g.l):
            if theta is not None and not theta.contains(arrival_angle(chain, True)):
                continue
            if node.id == ix.source:
                base, pred = 0.0, None
            else:
                claim = ix.preds[node.id].lookup(departure_angle(chain, True))
                if claim is None:
                    continue
                base, pred = claim.base_dist, claim.pred_edge
            total = base + chain.total_length
            if best is not None and total >= best[0]:
                continue
            if validate_chain(chain, occl):
                best = (total, node.id, chain, pred)

    if best is None:
        raise NoPath(f"no path to {tuple(t)} satisfies the requirements")
    total, head, chain, pred = best
    final = make_edge(len(g.edges), head, len(g.nodes), chain, True)
    sequence = trace(g, g.edges[pred]) if pred is not None else []
    return assemble_path([(e.chain, e.from_start) for e in sequence] + [(final.chain, True)],
                         total, [e.id for e in sequence] + [final.id])


def _checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_index(ix: PlannerIndex, path) -> None:
    """Write the index; only reached edges are kept and renumbered densely"""
    g = ix.graph
    reached = [e for e in g.edges if math.isfinite(e.dist)]
    renumber = {e.id: i for i, e in enumerate(reached)}
    edges = []
    for e in reached:
        u, v = (e.head, e.tail) if e.from_start else (e.tail, e.head)
        edges.append({
            "anchors": [u, v],
            "k": e.chain.k,
            "curvature": e.chain.curvature,
            "from_start": e.from_start,
            "w": e.w,
            "dist": e.dist,
            "pred": None if e.pred is None else renumber[e.pred],
        })
    preds = {
        str(node): [[r.interval.start, r.interval.width, renumber[r.pred_edge], r.base_dist, r.rank]
                    for r in plist.ranges()]
        for node, plist in ix.preds.items() if len(plist)
    }
    payload = {
        "nodes": [{"x": n.point.x, "y": n.point.y, "kind": n.kind, "obstacle": n.obstacle} for n in g.nodes],
        "edges": edges,
        "preds": preds,
    }
    document = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "fingerprint": ix.fingerprint,
        "checksum": _checksum(payload),
        "scene": scene_to_dict(ix.scene),
        "source": ix.source,
        "split_ranges": ix.split_ranges,
        **payload,
    }
    Path(path).write_text(json.dumps(document), encoding="utf-8")


def load_index(path, scene: Optional[Scene] = None) -> PlannerIndex:
    """Read an index; raises IndexMismatch on corruption or a foreign scene"""
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
        if document.get("format") != INDEX_FORMAT or document.get("version") != INDEX_VERSION:
            raise IndexMismatch(f"{path} is not a version {INDEX_VERSION} index")
        payload = {key: document[key] for key in ("nodes", "edges", "preds")}
        if _checksum(payload) != document["checksum"]:
            raise IndexMismatch(f"{path} is corrupt: checksum mismatch")
        stored = parse_scene(document["scene"])
        if stored.fingerprint() != document["fingerprint"]:
            raise IndexMismatch(f"{path} is corrupt: scene fingerprint mismatch")
        if scene is not None and scene.fingerprint() != document["fingerprint"]:
            logger.warning("index %s was built for another scene", path)
            raise IndexMismatch(f"{path} was built for a different scene")

        nodes = [Node(i, Point2(n["x"], n["y"]), n["kind"], n["obstacle"]) for i, n in enumerate(payload["nodes"])]
        edges = []
        for i, rec in enumerate(payload["edges"]):
            u, v = rec["anchors"]
            chain = build_chain(nodes[u].point, nodes[v].point, rec["k"], stored.alpha, rec["curvature"])
            if chain is None:
                raise IndexMismatch(f"{path} is corrupt: edge {i} has no feasible chain")
            head, tail = (u, v) if rec["from_start"] else (v, u)
            edge = make_edge(i, head, tail, chain, rec["from_start"])
            edge.dist = rec["dist"]
            edge.pred = rec["pred"]
            edges.append(edge)
        graph = PlannerGraph(nodes, edges, stored.alpha, stored.l, document["source"])
        preds = {node.id: PredList() for node in nodes}
        for node, ranges in payload["preds"].items():
            plist = preds[int(node)]
            for start, width, pred_edge, base_dist, rank in ranges:
                r = PredRange(AngularInterval(start, width), pred_edge, base_dist, rank)
                for lo, hi in r.interval.pieces():
                    insort(plist._pieces, (lo, hi, r), key=lambda item: item[0])
            plist._starts = [item[0] for item in plist._pieces]
    except IndexMismatch:
        raise
    except (OSError, ValueError, KeyError, TypeError, IndexError, AttributeError) as e:
        raise IndexMismatch(f"cannot load index {path}: {e}") from e

    return PlannerIndex(graph, preds, stored, document["fingerprint"], document["source"],
                        split_ranges=document.get("split_ranges", 0))
