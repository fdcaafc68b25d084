import itertools

import pytest
from hypothesis import given, settings, strategies as st

from coarselab.generators import (
    make_finite,
    make_grid,
    make_tree,
    parse_graph,
    parse_shape,
    tree_decode,
    tree_distance,
    tree_encode,
    tripod_legs,
)
from coarselab.graph_core import Base, GraphError, bfs_ball, boundary_components, distances_from


def test_grid_examples(Z, Z2):
    assert set(Z.neighbors(Base(0))) == {Base(-1), Base(1)}
    assert len(bfs_ball(Z2, Base(0, 0), 3).sphere(3)) == 12
    g3 = make_grid(3)
    for v in itertools.product(range(-2, 3), repeat=3):
        assert len(g3.neighbors(Base(*v))) == 6


def test_grid_dimension_range():
    with pytest.raises(ValueError):
        make_grid(5)


def test_tree_examples(T3):
    assert len(bfs_ball(T3, T3.basepoint, 3).sphere(3)) == 12
    comps = boundary_components(T3, T3.basepoint, 0, 6)
    assert sum(c.touches_horizon for c in comps) == 3
    t4 = make_tree(4)
    assert len(bfs_ball(t4, t4.basepoint, 2)) == 17


def test_cone_boundary_neighbors(cone):
    assert set(cone.neighbors(Base(2, 2))) == {Base(3, 2), Base(2, 1)}
    assert not cone.contains(Base(1, 2))


def test_ladder_components(ladder):
    comps = boundary_components(ladder, Base(0, 0), 1, 10)
    assert sum(c.touches_horizon for c in comps) == 2


def test_finite_shapes():
    iv = make_finite("interval", 2)
    assert len(iv) == 5 and iv.d(Base(-2), Base(2)) == 4
    t1 = make_finite("tripod", 1)
    legs1 = tripod_legs(1)
    tips = [leg[-1] for leg in legs1.values()]
    assert len(t1) == 4
    assert all(t1.d(a, b) == 2 for a, b in itertools.combinations(tips, 2))
    t3 = make_finite("tripod", 3)
    tips = [leg[-1] for leg in tripod_legs(3).values()]
    assert all(t3.d(a, b) == 6 for a, b in itertools.combinations(tips, 2))


def test_spec_strings():
    assert parse_graph("grid:2").name == "grid:2"
    assert parse_graph("tree:3").degree_bound == 3
    assert len(parse_shape("tripod:4")) == 13
    with pytest.raises(GraphError):
        parse_graph("torus:2")


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 2), max_size=7).filter(lambda w: all(a != b for a, b in zip(w, w[1:]))))
def test_tree_word_round_trip(word):
    assert tree_decode(tree_encode(word, 3), 3) == word


def test_tree_closed_form_matches_bfs(T3):
    verts = [v for v, _ in bfs_ball(T3, T3.basepoint, 4).vertices]
    for u in verts[::7]:
        row = distances_from(T3, u, 8)
        for v in verts:
            assert tree_distance(u, v, 3) == row[v]


@pytest.mark.parametrize("g", [make_grid(1), make_grid(2), make_tree(3)], ids=lambda g: g.name)
def test_labeling_is_a_geodesic(g):
    lab = g.labeling
    row = distances_from(g, lab.embed(0), 10)
    for n in range(-10, 11):
        assert lab.locate(lab.embed(n)) == n
        assert row[lab.embed(n)] == abs(n)


@pytest.mark.parametrize("g", [make_grid(2), make_tree(3)], ids=lambda g: g.name)
def test_neighbors_pure_and_symmetric(g):
    for v, _ in bfs_ball(g, g.basepoint, 3).vertices:
        first = g.neighbors(v)
        assert first == g.neighbors(v)
        assert all(v in g.neighbors(u) for u in first)
