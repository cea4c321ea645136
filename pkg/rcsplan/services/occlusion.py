"""Segment-blocking oracle over obstacle edges.

`blocked(p, q, ignore)` is true iff segment pq touches any indexed segment,
except for point contacts lying within IGNORE_RADIUS of an ignored point.
Grazing contacts and collinear overlaps of positive length always block.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import shapely

from rcsplan.config import IGNORE_RADIUS, PARAM_EPS
from rcsplan.errors import InvalidScene
from rcsplan.services.geometry import Point2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SegmentSet:
    """Obstacle edges as an (n, 4) array of [ax, ay, bx, by] rows."""

    segments: np.ndarray

    def __post_init__(self):
        segs = np.asarray(self.segments, dtype=float).reshape(-1, 4)
        lengths = np.hypot(segs[:, 2] - segs[:, 0], segs[:, 3] - segs[:, 1])
        if np.any(lengths <= 0.0):
            raise InvalidScene("segment set contains a zero-length segment")
        segs.setflags(write=False)
        object.__setattr__(self, "segments", segs)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Point2, Point2]]) -> "SegmentSet":
        return cls(np.array([[a[0], a[1], b[0], b[1]] for a, b in pairs], dtype=float))

    @classmethod
    def from_obstacles(cls, obstacles: Sequence[Sequence[Point2]]) -> "SegmentSet":
        """Boundary edges of polygons; a two-vertex obstacle is a single rod edge"""
        pairs = []
        for ring in obstacles:
            if len(ring) == 2:
                pairs.append((ring[0], ring[1]))
                continue
            pairs.extend((ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring)))
        return cls.from_pairs(pairs)

    @property
    def count(self) -> int:
        return len(self.segments)

    def __len__(self) -> int:
        return self.count


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def contact_mask(p: np.ndarray, q: np.ndarray, seg: np.ndarray,
                 ign_a: np.ndarray, ign_b: np.ndarray) -> np.ndarray:
    """Row-wise blocking predicate.

    p, q: (m, 2) query endpoints; seg: (m, 4) candidate segments;
    ign_a, ign_b: (m, 2) ignored points, NaN rows for none.
    """
    px, py = p[:, 0], p[:, 1]
    dx, dy = q[:, 0] - px, q[:, 1] - py
    ax, ay = seg[:, 0], seg[:, 1]
    fx, fy = seg[:, 2] - ax, seg[:, 3] - ay
    wx, wy = ax - px, ay - py

    dd = dx * dx + dy * dy
    ff = fx * fx + fy * fy
    denom = _cross(dx, dy, fx, fy)
    parallel = np.abs(denom) <= PARAM_EPS * np.sqrt(dd * ff)

    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(parallel, 0.0, _cross(wx, wy, fx, fy) / denom)
        s = np.where(parallel, 0.0, _cross(wx, wy, dx, dy) / denom)
    crossing = (~parallel & (t >= -PARAM_EPS) & (t <= 1.0 + PARAM_EPS)
                & (s >= -PARAM_EPS) & (s <= 1.0 + PARAM_EPS))

    # collinear case: project the candidate onto pq
    collinear = parallel & (np.abs(_cross(wx, wy, dx, dy)) <= PARAM_EPS * dd)
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = (wx * dx + wy * dy) / dd
        tb = ((seg[:, 2] - px) * dx + (seg[:, 3] - py) * dy) / dd
    lo = np.maximum(0.0, np.minimum(ta, tb))
    hi = np.minimum(1.0, np.maximum(ta, tb))
    overlap = collinear & (hi >= lo - PARAM_EPS)
    span = np.maximum(hi - lo, 0.0) * np.sqrt(dd)
    stretch = overlap & (span > IGNORE_RADIUS)

    t_point = np.where(crossing, t, lo)
    cx = px + t_point * dx
    cy = py + t_point * dy
    point_contact = crossing | (overlap & ~stretch)

    with np.errstate(invalid="ignore"):
        near_a = np.hypot(cx - ign_a[:, 0], cy - ign_a[:, 1]) <= IGNORE_RADIUS
        near_b = np.hypot(cx - ign_b[:, 0], cy - ign_b[:, 1]) <= IGNORE_RADIUS
    ignored = point_contact & (near_a | near_b)
    return stretch | (point_contact & ~ignored)


def _ignore_rows(ignores: Sequence[Sequence[Point2]], m: int) -> Tuple[np.ndarray, np.ndarray]:
    rows_a = np.full((m, 2), np.nan)
    rows_b = np.full((m, 2), np.nan)
    for i, pts in enumerate(ignores):
        pts = list(pts)
        if len(pts) > 2:
            raise ValueError("at most two ignored points per query")
        if pts:
            rows_a[i] = pts[0]
        if len(pts) > 1:
            rows_b[i] = pts[1]
    return rows_a, rows_b


class _IndexBase:
    def __init__(self, segment_set: SegmentSet, regions=None):
        self.segment_set = segment_set
        self._segs = segment_set.segments
        self._regions = regions
        if regions is not None and not shapely.is_empty(regions):
            shapely.prepare(regions)
        else:
            self._regions = None

    def _candidates(self, starts: np.ndarray, ends: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def blocked_legs(self, starts, ends, ignores: Optional[Sequence[Sequence[Point2]]] = None) -> np.ndarray:
        """Vectorised `blocked` over m legs"""
        starts = np.asarray(starts, dtype=float).reshape(-1, 2)
        ends = np.asarray(ends, dtype=float).reshape(-1, 2)
        m = len(starts)
        result = np.zeros(m, dtype=bool)
        if m == 0 or len(self._segs) == 0:
            return result
        ign_a, ign_b = _ignore_rows(ignores or [()] * m, m)
        query_ids, seg_ids = self._candidates(starts, ends)
        if len(query_ids) == 0:
            return result
        hits = contact_mask(starts[query_ids], ends[query_ids], self._segs[seg_ids],
                            ign_a[query_ids], ign_b[query_ids])
        result[query_ids[hits]] = True
        return result

    def blocked(self, p: Point2, q: Point2, ignore: Iterable[Point2] = ()) -> bool:
        return bool(self.blocked_legs([p], [q], [tuple(ignore)])[0])

    def interior(self, points) -> np.ndarray:
        """True for points strictly inside an obstacle polygon"""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if self._regions is None or len(pts) == 0:
            return np.zeros(len(pts), dtype=bool)
        inside = shapely.contains_xy(self._regions, pts[:, 0], pts[:, 1])
        return np.asarray(inside, dtype=bool).reshape(-1)


class LinearScanIndex(_IndexBase):
    """Reference oracle: every query is tested against every segment."""

    def _candidates(self, starts, ends):
        m, n = len(starts), len(self._segs)
        return np.repeat(np.arange(m), n), np.tile(np.arange(n), m)


class OcclusionIndex(_IndexBase):
    """STRtree-accelerated oracle; answers match LinearScanIndex exactly."""

    def __init__(self, segment_set: SegmentSet, regions=None):
        super().__init__(segment_set, regions)
        segs = self._segs
        self._tree = shapely.STRtree(shapely.linestrings(segs.reshape(-1, 2, 2))) if len(segs) else None
        extent = float(np.abs(segs).max()) if len(segs) else 1.0
        self._pad = IGNORE_RADIUS * max(1.0, extent)
        logger.debug("occlusion index over %d segments", len(segs))

    def _candidates(self, starts, ends):
        lo = np.minimum(starts, ends) - self._pad
        hi = np.maximum(starts, ends) + self._pad
        boxes = shapely.box(lo[:, 0], lo[:, 1], hi[:, 0], hi[:, 1])
        query_ids, seg_ids = self._tree.query(boxes)
        return query_ids.astype(np.intp), seg_ids.astype(np.intp)


def build_index(s: SegmentSet, regions=None, accelerated: bool = True) -> _IndexBase:
    """Preprocess obstacle edges (and optionally polygon interiors) for queries"""
    cls = OcclusionIndex if accelerated else LinearScanIndex
    return cls(s, regions)


def blocked(idx: _IndexBase, p: Point2, q: Point2, ignore: Iterable[Point2] = ()) -> bool:
    if Point2(*p) == Point2(*q):
        raise ValueError("query segment is degenerate")
    return idx.blocked(p, q, ignore)
