import math

import numpy as np
import pytest

from rcsplan.services.geometry import AngularInterval, Point2, build_chain, enumerate_chains, vlr
from rcsplan.services.graph import (
    SOURCE,
    TARGET,
    VERTEX,
    AngularEdgeList,
    ChainEdge,
    build_graph,
    edge_bound,
    validate_chain,
    validate_chains,
    vs,
)
from rcsplan.services.occlusion import build_index

from tests.conftest import random_rod_scene


def _edge(edge_id, dep):
    return ChainEdge(edge_id, 0, 1, None, 1.0, True, dep, dep)


def _index(scene):
    return build_index(scene.segment_set(), scene.regions())


def test_report_across_zero():
    edges = AngularEdgeList([_edge(0, 0.1), _edge(1, 1.0), _edge(2, 3.0), _edge(3, 6.2)])
    window = AngularInterval.between(6.0, 0.5)
    assert sorted(e.id for e in edges.report(window)) == [0, 3]
    assert [e.id for e in edges.report(AngularInterval.full())] == [0, 1, 2, 3]


def test_removed_edges_are_not_reported():
    edges = AngularEdgeList([_edge(i, 0.5 * i) for i in range(8)])
    assert edges.remove(next(e for e in edges if e.id == 3))
    assert edges.remove(next(e for e in edges.report(AngularInterval.full()) if e.id == 2))
    assert [e.id for e in edges.report(AngularInterval(1.0, 1.6))] == [4, 5]
    assert len(edges) == 6
    edges.reset()
    assert len(edges) == 8
    assert [e.id for e in edges.report(AngularInterval(1.0, 1.6))] == [2, 3, 4, 5]


def test_remove_twice_reports_false():
    e = _edge(0, 1.0)
    edges = AngularEdgeList([e])
    assert edges.remove(e)
    assert e not in edges
    assert not edges.remove(e)


def test_edges_sorted_by_departure():
    edges = AngularEdgeList([_edge(0, 2.0), _edge(1, 0.3), _edge(2, 5.0)])
    assert [e.id for e in edges] == [1, 0, 2]


def test_empty_scene_graph(empty_scene):
    g = build_graph(empty_scene, _index(empty_scene))
    assert [n.kind for n in g.nodes] == [SOURCE, TARGET]
    # straight chain plus one k=1 chain per curvature, both traversals each
    assert g.edge_count == 6
    assert g.edge_count <= edge_bound(g.node_count, empty_scene.alpha)
    assert {(e.head, e.tail) for e in g.edges} == {(0, 1), (1, 0)}
    forward = [e for e in g.edges if e.from_start]
    assert all(e.head == 0 for e in forward)


def test_node_order(rod_wall_scene):
    g = build_graph(rod_wall_scene, _index(rod_wall_scene))
    assert [n.kind for n in g.nodes] == [VERTEX, VERTEX, SOURCE, TARGET]
    assert (g.source, g.target) == (2, 3)
    assert g.position(0) == Point2(200.0, 120.0)


def test_rod_blocks_straight_chain(rod_wall_scene):
    g = build_graph(rod_wall_scene, _index(rod_wall_scene))
    assert not any({e.head, e.tail} == {2, 3} and e.chain.k == 0 for e in g.edges)
    straight = build_chain(rod_wall_scene.source, rod_wall_scene.target, 0, rod_wall_scene.alpha, 1)
    assert not validate_chain(straight, _index(rod_wall_scene))


def test_chain_ending_at_rod_vertex_is_valid(rod_wall_scene):
    chain = build_chain(rod_wall_scene.source, Point2(200.0, 280.0), 0, rod_wall_scene.alpha, 1)
    assert validate_chain(chain, _index(rod_wall_scene))


def test_diagonal_through_polygon_is_invalid(square_scene):
    chain = build_chain(Point2(40.0, -20.0), Point2(60.0, 20.0), 0, square_scene.alpha, 1)
    assert not validate_chain(chain, _index(square_scene))


def test_edge_bound():
    assert edge_bound(2, math.radians(30)) == 2 * 1 * 2 * 12
    assert edge_bound(1, math.radians(30)) == 0


def test_graph_is_identical_with_workers():
    scene = random_rod_scene(5)
    idx = _index(scene)
    one = build_graph(scene, idx)
    many = build_graph(scene, idx, workers=4)
    assert [(e.head, e.tail, e.chain.k, e.chain.curvature) for e in one.edges] == \
           [(e.head, e.tail, e.chain.k, e.chain.curvature) for e in many.edges]


def test_valid_successors_respect_turn(empty_scene):
    g = build_graph(empty_scene, _index(empty_scene))
    into_target = next(e for e in g.edges if e.tail == g.target and e.chain.k == 0)
    leaving = vs(g, into_target)
    assert all(abs(math.remainder(e.dep - into_target.arr, 2 * math.pi)) <= g.alpha + 1e-9 for e in leaving)


def test_reset_restores_state(empty_scene):
    g = build_graph(empty_scene, _index(empty_scene))
    e = g.edges[0]
    e.dist, e.pred = 5.0, 1
    g.edges_out[e.head].remove(e)
    g.reset()
    assert math.isinf(e.dist) and e.pred is None
    assert e in g.edges_out[e.head]


def test_valid_successors_match_a_linear_filter():
    rng = np.random.default_rng(21)
    for seed in range(3):
        scene = random_rod_scene(seed)
        g = build_graph(scene, _index(scene))
        for e in g.edges:
            if rng.random() < 0.3:
                g.edges_out[e.head].remove(e)
        for e in g.edges:
            window = vlr(e.chain, e.from_start, g.alpha)
            expected = sorted(f.id for f in g.edges_out[e.tail] if window.contains(f.dep))
            assert sorted(f.id for f in vs(g, e)) == expected


def test_batched_validation_matches_single_chains():
    scene = random_rod_scene(4, rods=5)
    idx = _index(scene)
    points = [p for ring in scene.obstacles for p in ring] + [scene.source, scene.target]
    chains = [c for i, a in enumerate(points) for b in points[i + 1:]
              for c in enumerate_chains(a, b, scene.alpha, scene.l)]
    batched = validate_chains(chains, idx)
    assert batched.tolist() == [validate_chain(c, idx) for c in chains]
    assert batched.any() and not batched.all()
    assert validate_chains([], idx).shape == (0,)
