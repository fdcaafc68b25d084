import pytest

from coarselab.chain import ChainError, audit_chain, build_chain, find_separation_radius
from coarselab.graph_core import Base, distance


def test_separation_radius(Z, ladder, T3):
    assert find_separation_radius(Z, [Base(k) for k in range(-10, 11)], 40, 5) == 1
    rails = [Base(k, y) for k in range(-5, 6) for y in (0, 1)]
    assert find_separation_radius(ladder, rails, 40, 5) == 1
    assert find_separation_radius(T3, [T3.basepoint], 12, 4) is None


def test_line_chain_orientation(Z):
    # the forward side at x_0 holds the least horizon vertex, here -horizon
    ch = build_chain(Z, Base(0), 1, (-5, 5))
    assert ch.x == {k: Base(-3 * k) for k in range(-5, 6)}
    ch2 = build_chain(Z, Base(0), 2, (-3, 3))
    assert ch2.x == {k: Base(-5 * k) for k in range(-3, 4)}


def test_ladder_chain(ladder):
    ch = build_chain(ladder, Base(0, 0), 1, (-4, 4))
    assert [ch.x[k] for k in range(1, 5)] == [Base(-3 * k, 0) for k in range(1, 5)]
    assert [ch.x[-k] for k in range(1, 5)] == [Base(2 * k, k % 2) for k in range(1, 5)]


@pytest.mark.parametrize("name,r", [("Z", 1), ("Z", 2), ("ladder", 1)])
def test_chain_steps_and_audit(name, r, request):
    g = request.getfixturevalue(name)
    ch = build_chain(g, g.basepoint, r, (-8, 8))
    for k in range(-8, 8):
        assert distance(g, ch.x[k], ch.x[k + 1], 10 * r) == 2 * r + 1
    audit = audit_chain(ch, g, 20)
    assert audit.passed
    assert audit.max_gap_chain <= 3 * r + 1
    js = audit.to_json()
    assert js["surjectivity"]["bound"] == 3 * r + 1


def test_chain_needs_two_ends(Z2, T3):
    with pytest.raises(ChainError, match="index 0"):
        build_chain(Z2, Base(0, 0), 1, (-2, 2))
    with pytest.raises(ChainError):
        build_chain(T3, T3.basepoint, 1, (0, 1))


def test_chain_json(Z):
    ch = build_chain(Z, Base(0), 1, (-1, 1))
    assert ch.to_json() == [[-1, "b:3"], [0, "b:0"], [1, "b:-3"]]


def test_k_range_must_hold_zero(Z):
    with pytest.raises(ValueError):
        build_chain(Z, Base(0), 1, (1, 3))
