import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from coarselab.decorate import (
    GeodesicAuditError,
    ThresholdNotFound,
    cubicalize,
    decorate,
    find_threshold_N,
    g_alpha,
    ratio_series,
    threshold_inequality,
    tip_distance,
)
from coarselab.generators import GeodesicLabeling, make_grid, make_tree
from coarselab.graph_core import Base, GraphError, Seg, bfs_ball, distance

ALPHAS = (0.25, 0.5, 1)


def float_g(alpha, x):
    """Plain double-precision oracle; None when too close to an integer to trust."""
    v = math.log(x) ** alpha
    if abs(v - round(v)) < 1e-6:
        return None
    return math.ceil(v)


def test_g_alpha_examples():
    for a in ALPHAS:
        assert g_alpha(a, 1) == 0
    assert g_alpha(1, 100) == 5
    assert g_alpha(0.5, 100) == 3
    assert g_alpha(1, math.e**16) == 16


@pytest.mark.parametrize("alpha", ALPHAS)
def test_g_alpha_matches_float_oracle(alpha):
    for x in range(2, 3000):
        ref = float_g(alpha, x)
        if ref is not None:
            assert g_alpha(alpha, x) == ref


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(ALPHAS), st.integers(1, 10**6), st.integers(1, 10**6))
def test_g_alpha_monotone(alpha, a, b):
    lo, hi = sorted((a, b))
    assert g_alpha(alpha, lo) <= g_alpha(alpha, hi)


def test_g_alpha_domain():
    with pytest.raises(ValueError):
        g_alpha(0, 5)
    with pytest.raises(ValueError):
        g_alpha(1.5, 5)
    with pytest.raises(ValueError):
        g_alpha(0.5, 0)


def test_tip_distance_examples():
    assert tip_distance(1, 3) == 11
    for a in ALPHAS:
        assert tip_distance(a, 1) == 1
    assert tip_distance(0.5, 10) == 102


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("base", ["grid:1", "grid:2"])
def test_tip_distance_by_bfs(base, alpha):
    g = make_grid(int(base[-1]))
    X = decorate(g, g.labeling, alpha)
    for m in range(2, 13):
        tip = X.tip(m)
        assert distance(X, X.basepoint, tip, 400) == tip_distance(alpha, m)


def test_tip_distance_on_tree_small_m():
    t = make_tree(3)
    X = decorate(t, t.labeling, 1)
    for m in range(2, 5):
        assert distance(X, X.basepoint, X.tip(m), 40) == tip_distance(1, m)


def test_decorated_adjacency():
    g = make_grid(1)
    X = decorate(g, g.labeling, 1)
    assert X.neighbors(Seg(2, 1)) == [Base(4)]
    assert X.neighbors(Base(9)) == [Base(8), Base(10), Seg(3, 1)]
    assert X.neighbors(Base(1)) == [Base(0), Base(2)]
    assert X.seg_length(3) == 2 and X.contains(Seg(3, 2)) and not X.contains(Seg(3, 3))
    assert X.neighbors(Seg(3, 2)) == [Seg(3, 1)]
    assert X.name == "decorate:grid:1:alpha=1"


def test_decorated_ball_is_symmetric():
    g = make_grid(2)
    X = decorate(g, g.labeling, 0.5)
    ball = bfs_ball(X, X.basepoint, 30)
    assert sum(v.kind == 1 for v, _ in ball.vertices) == sum(
        X.seg_length(n) for n in range(1, 6)
    )


def test_geodesic_audit_rejects_bad_labeling():
    g = make_grid(2)
    bad = GeodesicLabeling(lambda n: Base(n, n), lambda v: v.data[0] if v.data[0] == v.data[1] else None)
    with pytest.raises(GeodesicAuditError):
        decorate(g, bad, 1)
    folded = GeodesicLabeling(lambda n: Base(abs(n), 0), lambda v: v.data[0] if v.data[1] == 0 else None)
    with pytest.raises(GeodesicAuditError):
        decorate(g, folded, 1)


def test_ratio_series_examples():
    vals = ratio_series(0.5, 1, (1, 0), [0, 1], [math.e**4, math.e**16, math.e**36])
    assert vals == pytest.approx([0.5, 0.25, 1 / 6], abs=1e-12)
    with pytest.raises(ValueError):
        ratio_series(1, 1, (1, 0), [0, 1], [100])
    with pytest.raises(ValueError):
        ratio_series(0.5, 1, (1, 0), [0, 1], [1])


def sweep_threshold(alpha, beta, factor=10, top=5000):
    """Float oracle: first N whose window [N, factor N] has no failure."""

    def g(a, x):
        v = math.log(x) ** a
        return round(v) if abs(v - round(v)) < 1e-9 else math.ceil(v)

    bad = [x for x in range(1, top) if not g(beta, x) > g(alpha, x + 2 * x * x)]
    for N in range(1, top // factor):
        if not any(N <= f <= factor * N for f in bad):
            return N
    raise AssertionError("sweep range too small")


def test_threshold_examples():
    assert find_threshold_N(0.5, 1, 1, 0, 0, 0) == 21
    lhs, rhs, holds = threshold_inequality(0.5, 1, 1, 0, 0, 0, 20)
    assert (lhs, rhs, holds) == (3, 3, False)
    assert all(threshold_inequality(0.5, 1, 1, 0, 0, 0, x)[2] for x in range(21, 211))
    with pytest.raises(ValueError):
        find_threshold_N(1, 1, 1, 0, 0, 0)


@pytest.mark.parametrize("alpha,beta", [(0.5, 1), (0.25, 1), (0.25, 0.5)])
def test_threshold_matches_sweep(alpha, beta):
    N = find_threshold_N(alpha, beta, 1, 0, 0, 0)
    assert N == sweep_threshold(alpha, beta, top=max(5000, 11 * N))


def test_threshold_ceiling_reported():
    with pytest.raises(ThresholdNotFound, match="100"):
        find_threshold_N(0.5, 1, 3, 5, 2, 2, ceiling=100)


def test_cubicalize_keeps_low_degree_graphs():
    z = make_grid(1)
    cz = cubicalize(z)
    for k in range(-5, 6):
        assert cz.neighbors(Base(k)) == sorted(z.neighbors(Base(k)))
    t = make_tree(3)
    ct = cubicalize(t)
    for v, _ in bfs_ball(t, t.basepoint, 3).vertices:
        assert ct.neighbors(v) == sorted(t.neighbors(v))


def test_cubicalize_grid_degree_and_distortion():
    g = make_grid(2)
    c = cubicalize(g)
    assert c.degree_bound == 3
    for v, _ in bfs_ball(c, c.basepoint, 8).vertices:
        assert len(c.neighbors(v)) <= 3
    rng = random.Random(7)
    pts = [v for v, _ in bfs_ball(g, g.basepoint, 6).vertices]
    for _ in range(30):
        u, v = rng.choice(pts), rng.choice(pts)
        d = distance(g, u, v, 30)
        dc = distance(c, c.representative(u), c.representative(v), 200)
        assert d <= dc <= 4 * d + 4


def test_cubicalize_rejects_foreign_vertex():
    c = cubicalize(make_grid(2))
    with pytest.raises(GraphError):
        c.neighbors(Base(0, 0, 9))
