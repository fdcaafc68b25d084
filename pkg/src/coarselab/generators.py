"""Example graphs as oracles, finite test shapes, and CLI spec-string parsing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .graph_core import Base, FiniteMetric, GraphError, GraphOracle, VertexId, metric_from_edges


@dataclass(frozen=True)
class GeodesicLabeling:
    """A bi-infinite geodesic ``n -> x_n`` with its partial inverse."""

    embed: Callable[[int], VertexId]
    locate: Callable[[VertexId], Optional[int]]


# -- grids -------------------------------------------------------------------


def make_grid(d: int) -> GraphOracle:
    """Cayley graph of Z^d for the standard symmetric generators."""
    if not 1 <= d <= 4:
        raise GraphError(f"grid dimension must be in 1..4, got {d}")
    zero = (0,) * d

    def neighbors(v):
        c = v.data
        out = []
        for i in range(d):
            for step in (-1, 1):
                w = list(c)
                w[i] += step
                out.append(Base(*w))
        out.sort()
        return out

    def contains(v):
        return v.kind == 0 and len(v.data) == d

    def locate(v):
        if v.kind == 0 and v.data[1:] == zero[1:]:
            return v.data[0]
        return None

    labeling = GeodesicLabeling(lambda n: Base(n, *zero[1:]), locate)
    return GraphOracle(neighbors, 2 * d, Base(*zero), f"grid:{d}", contains, labeling=labeling)


def make_cone() -> GraphOracle:
    """Subgraph of the Z^2 grid induced by ``{(x, y) : |y| <= |x|}``."""

    def inside(x, y):
        return abs(y) <= abs(x)

    def neighbors(v):
        x, y = v.data
        cand = ((x - 1, y), (x, y - 1), (x, y + 1), (x + 1, y))
        return [Base(a, b) for a, b in cand if inside(a, b)]

    def contains(v):
        return v.kind == 0 and len(v.data) == 2 and inside(*v.data)

    def locate(v):
        if v.kind == 0 and v.data[1] == 0:
            return v.data[0]
        return None

    labeling = GeodesicLabeling(lambda n: Base(n, 0), locate)
    return GraphOracle(neighbors, 4, Base(0, 0), "cone", contains, labeling=labeling)


def make_ladder() -> GraphOracle:
    """Z x P_2: two parallel lines joined by rungs."""

    def neighbors(v):
        x, y = v.data
        return sorted((Base(x - 1, y), Base(x + 1, y), Base(x, 1 - y)))

    def contains(v):
        return v.kind == 0 and len(v.data) == 2 and v.data[1] in (0, 1)

    def locate(v):
        if v.kind == 0 and v.data[1] == 0:
            return v.data[0]
        return None

    labeling = GeodesicLabeling(lambda n: Base(n, 0), locate)
    return GraphOracle(neighbors, 3, Base(0, 0), "ladder", contains, labeling=labeling)


# -- regular trees -------------------------------------------------------------
#
# The q-regular tree is the Cayley graph of the free product of q copies of Z/2:
# vertices are words over {0..q-1} without repeated adjacent letters. A word is
# stored as Base(length, code) with code its base-q value (first letter most
# significant). Words over {0, 1} form the spine x_n: "0101..." of length n for
# n > 0 and "1010..." of length |n| for n < 0.


def tree_encode(word, q: int) -> VertexId:
    code = 0
    for a in word:
        code = code * q + a
    return Base(len(word), code)


def tree_decode(v: VertexId, q: int) -> list[int]:
    length, code = v.data
    word = [0] * length
    for i in range(length - 1, -1, -1):
        code, word[i] = divmod(code, q)
    return word


def tree_distance(u: VertexId, v: VertexId, q: int) -> int:
    """Closed-form word metric: ``|u| + |v| - 2 * lcp(u, v)``."""
    a, b = tree_decode(u, q), tree_decode(v, q)
    lcp = 0
    for x, y in zip(a, b):
        if x != y:
            break
        lcp += 1
    return len(a) + len(b) - 2 * lcp


def _spine_prefix(word) -> int:
    p = 0
    for a in word:
        if a > 1:
            break
        p += 1
    return p


def make_tree(q: int) -> GraphOracle:
    """The q-regular tree rooted at the empty word."""
    if q < 3:
        raise GraphError(f"tree degree must be >= 3, got {q}")

    def neighbors(v):
        word = tree_decode(v, q)
        out = []
        if word:
            out.append(tree_encode(word[:-1], q))
        last = word[-1] if word else None
        for a in range(q):
            if a != last:
                out.append(tree_encode(word + [a], q))
        out.sort()
        return out

    def contains(v):
        if v.kind != 0 or len(v.data) != 2:
            return False
        length, code = v.data
        if length < 0 or not 0 <= code < q**length:
            return False
        word = tree_decode(v, q)
        return all(a != b for a, b in zip(word, word[1:]))

    def spine_distance(v):
        word = tree_decode(v, q)
        return len(word) - _spine_prefix(word)

    def fold(c, parent):
        # subtree beyond c is spine-free exactly when c is off the spine and
        # parent is its spine-ward neighbor
        if c.kind != 0 or parent.kind != 0:
            return None
        dc = spine_distance(c)
        if dc > 0 and spine_distance(parent) == dc - 1:
            return ("free", q)
        return None

    def embed(n):
        if n >= 0:
            return tree_encode([i % 2 for i in range(n)], q)
        return tree_encode([(i + 1) % 2 for i in range(-n)], q)

    def locate(v):
        if v.kind != 0:
            return None
        word = tree_decode(v, q)
        if _spine_prefix(word) != len(word):
            return None
        if not word:
            return 0
        return len(word) if word[0] == 0 else -len(word)

    g = GraphOracle(
        neighbors,
        q,
        Base(0, 0),
        f"tree:{q}",
        contains,
        fold=fold,
        acyclic=True,
        labeling=GeodesicLabeling(embed, locate),
    )
    g.meta["q"] = q
    return g


# -- finite shapes ---------------------------------------------------------------


def interval_points(n: int) -> tuple[list, list]:
    pts = [Base(k) for k in range(-n, n + 1)]
    return pts, list(zip(pts, pts[1:]))


def tripod_points(n: int) -> tuple[list, list]:
    """T_n as the subgraph of Z^2 on ``(k, 0), |k| <= n`` and ``(0, k), 0 <= k <= n``."""
    horiz = [Base(k, 0) for k in range(-n, n + 1)]
    vert = [Base(0, k) for k in range(1, n + 1)]
    edges = list(zip(horiz, horiz[1:]))
    edges.append((Base(0, 0), Base(0, 1)))
    edges.extend(zip(vert, vert[1:]))
    return sorted(horiz + vert), edges


def make_finite(kind: str, n: int) -> FiniteMetric:
    """Exact path metric on ``interval`` (2n+1 points) or ``tripod`` (3n+1 points)."""
    if n < 1:
        raise ValueError("shape size must be >= 1")
    if kind == "interval":
        pts, edges = interval_points(n)
    elif kind == "tripod":
        pts, edges = tripod_points(n)
    else:
        raise ValueError(f"unknown finite shape {kind!r}")
    return metric_from_edges(pts, edges)


def tripod_legs(n: int) -> dict:
    """Leg name -> points from the center outward (center excluded)."""
    return {
        "a": [Base(-k, 0) for k in range(1, n + 1)],
        "b": [Base(k, 0) for k in range(1, n + 1)],
        "c": [Base(0, k) for k in range(1, n + 1)],
    }


# -- spec strings ------------------------------------------------------------------


def parse_graph(spec: str) -> GraphOracle:
    """``grid:d``, ``tree:q``, ``cone``, ``ladder`` or ``decorate:<base-spec>:alpha=<a>``."""
    spec = spec.strip()
    try:
        if spec.startswith("decorate:"):
            from .decorate import decorate

            body = spec[len("decorate:"):]
            base_spec, _, alpha_part = body.rpartition(":")
            if not alpha_part.startswith("alpha="):
                raise GraphError(f"decorate spec needs ':alpha=<a>', got {spec!r}")
            base = parse_graph(base_spec)
            return decorate(base, base.labeling, float(alpha_part[len("alpha="):]))
        head, _, arg = spec.partition(":")
        if head == "grid":
            return make_grid(int(arg))
        if head == "tree":
            return make_tree(int(arg))
        if head == "cone" and not arg:
            return make_cone()
        if head == "ladder" and not arg:
            return make_ladder()
    except ValueError as exc:
        raise GraphError(f"bad graph spec {spec!r}: {exc}") from exc
    raise GraphError(f"unknown graph spec {spec!r}")


def parse_shape(spec: str) -> FiniteMetric:
    """``interval:n`` or ``tripod:n``."""
    head, _, arg = spec.strip().partition(":")
    if head not in ("interval", "tripod"):
        raise GraphError(f"unknown shape spec {spec!r}")
    try:
        return make_finite(head, int(arg))
    except ValueError as exc:
        raise GraphError(f"bad shape spec {spec!r}: {exc}") from exc
