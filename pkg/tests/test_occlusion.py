import numpy as np
import pytest
from shapely.geometry import Polygon

from rcsplan.errors import InvalidScene
from rcsplan.services.geometry import Point2
from rcsplan.services.occlusion import LinearScanIndex, OcclusionIndex, SegmentSet, blocked, build_index


@pytest.fixture
def rod_index():
    return build_index(SegmentSet.from_pairs([((0.0, -1.0), (0.0, 1.0))]))


def test_crossing_blocks(rod_index):
    assert blocked(rod_index, Point2(-1, 0), Point2(1, 0))


def test_parallel_miss_is_free(rod_index):
    assert not blocked(rod_index, Point2(1, -1), Point2(1, 1))
    assert not blocked(rod_index, Point2(-1, 2), Point2(1, 2))


def test_contact_at_ignored_endpoint_is_free(rod_index):
    assert blocked(rod_index, Point2(-1, 1), Point2(0, 1))
    assert not blocked(rod_index, Point2(-1, 1), Point2(0, 1), ignore=[Point2(0, 1)])


def test_grazing_a_vertex_blocks(rod_index):
    assert blocked(rod_index, Point2(-1, 2), Point2(1, 0))


def test_collinear_overlap_blocks_even_when_ignored(rod_index):
    assert blocked(rod_index, Point2(0, 1), Point2(0, 3), ignore=[Point2(0, 1)]) is False
    assert blocked(rod_index, Point2(0, -2), Point2(0, 2), ignore=[Point2(0, -2), Point2(0, 2)])
    assert blocked(rod_index, Point2(0, 0), Point2(0, 5), ignore=[Point2(0, 0)])


def test_degenerate_query_is_rejected(rod_index):
    with pytest.raises(ValueError):
        blocked(rod_index, Point2(2, 2), Point2(2, 2))


def test_zero_length_segment_is_rejected():
    with pytest.raises(InvalidScene):
        SegmentSet.from_pairs([((1.0, 1.0), (1.0, 1.0))])


def test_polygon_edges_and_rods():
    square = [Point2(0, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)]
    rod = [Point2(5, 5), Point2(6, 6)]
    segments = SegmentSet.from_obstacles([square, rod])
    assert len(segments) == 5


def test_interior_uses_polygon_regions():
    square = Polygon([(0, 0), (2, 0), (2, 2), (0, 2)])
    idx = build_index(SegmentSet.from_obstacles([[Point2(*c) for c in square.exterior.coords[:-1]]]), square)
    assert idx.interior([(1, 1), (3, 3), (2, 1)]).tolist() == [True, False, False]


def test_empty_index_never_blocks():
    idx = build_index(SegmentSet.from_pairs([]))
    assert not idx.blocked(Point2(0, 0), Point2(1, 1))
    assert idx.blocked_legs(np.zeros((0, 2)), np.zeros((0, 2))).shape == (0,)


def test_too_many_ignored_points(rod_index):
    with pytest.raises(ValueError):
        rod_index.blocked(Point2(-1, 0), Point2(1, 0), ignore=[Point2(0, 0)] * 3)


def test_accelerated_index_matches_linear_scan():
    rng = np.random.default_rng(3)
    starts = rng.uniform(0, 100, size=(200, 2))
    segs = np.hstack([starts, starts + rng.uniform(-15, 15, size=(200, 2))])
    segment_set = SegmentSet(segs)
    fast, slow = OcclusionIndex(segment_set), LinearScanIndex(segment_set)

    p = rng.uniform(0, 100, size=(500, 2))
    q = rng.uniform(0, 100, size=(500, 2))
    # every third query ends exactly on a segment endpoint and ignores it
    q[::3] = segs[rng.integers(0, 200, size=len(q[::3])), :2]
    ignores = [(Point2(*q[i]),) if i % 3 == 0 else () for i in range(len(q))]
    np.testing.assert_array_equal(fast.blocked_legs(p, q, ignores), slow.blocked_legs(p, q, ignores))
    assert fast.blocked_legs(p, q, ignores).any()


def _random_segments(rng, n):
    starts = rng.uniform(0, 100, size=(n, 2))
    return np.hstack([starts, starts + rng.uniform(-15, 15, size=(n, 2))])


def test_blocking_ignores_query_direction():
    rng = np.random.default_rng(8)
    idx = OcclusionIndex(SegmentSet(_random_segments(rng, 40)))
    p = rng.uniform(0, 100, size=(400, 2))
    q = rng.uniform(0, 100, size=(400, 2))
    forward = idx.blocked_legs(p, q)
    np.testing.assert_array_equal(forward, idx.blocked_legs(q, p))
    assert forward.any() and not forward.all()


def test_more_segments_never_free_a_leg():
    rng = np.random.default_rng(9)
    segs = _random_segments(rng, 60)
    p = rng.uniform(0, 100, size=(400, 2))
    q = rng.uniform(0, 100, size=(400, 2))
    fewer = OcclusionIndex(SegmentSet(segs[:20])).blocked_legs(p, q)
    more = OcclusionIndex(SegmentSet(segs)).blocked_legs(p, q)
    assert not (fewer & ~more).any()
    assert (more & ~fewer).any()
