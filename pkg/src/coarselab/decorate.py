"""Decorated graphs X_alpha and their numeric companions.

X_alpha hangs a path of length ``g_alpha(n) = ceil(log(n) ** alpha)`` off the
geodesic vertex ``x_{n^2}`` for every n >= 1 (natural log).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from numbers import Real
from typing import Optional, Sequence

import mpmath

from .generators import GeodesicLabeling
from .graph_core import Base, GraphError, GraphOracle, Seg, VertexId

TIE_EPSILON = 1e-9
_MP = mpmath.mp.clone()
_MP.dps = 50


class GeodesicAuditError(GraphError):
    pass


class ThresholdNotFound(RuntimeError):
    pass


@dataclass(frozen=True)
class DecorationParams:
    alpha: float
    tie_epsilon: float = TIE_EPSILON

    def __post_init__(self):
        _check_alpha(self.alpha)


def _check_alpha(alpha) -> None:
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")


def _to_mpf(x):
    if isinstance(x, Fraction):
        return _MP.mpf(x.numerator) / x.denominator
    return _MP.mpf(x)


@lru_cache(maxsize=1 << 16)
def _g_cached(alpha, x) -> int:
    value = _MP.log(_to_mpf(x)) ** _to_mpf(alpha)
    nearest = _MP.nint(value)
    if abs(value - nearest) <= TIE_EPSILON:
        return int(nearest)
    return int(_MP.ceil(value))


def g_alpha(alpha, x) -> int:
    """``ceil(ln(x) ** alpha)`` in 50-digit precision.

    Values within 1e-9 of an integer snap to it first, so ``x = e**16`` given
    as a float still yields exactly 16 for alpha = 1.
    """
    _check_alpha(alpha)
    if x < 1:
        raise ValueError(f"g_alpha is evaluated at x >= 1, got {x}")
    if isinstance(x, Real) and not isinstance(x, (int, Fraction)):
        x = float(x)
    return _g_cached(alpha, x)


def tip_distance(alpha, m: int) -> int:
    """``d(x_0, t_m)`` in X_alpha: the segment root sits at distance m^2 on the geodesic."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return m * m + g_alpha(alpha, m)


# -- geodesic audit -------------------------------------------------------------


@dataclass
class GeodesicAudit:
    window: int
    bfs_radius: int
    pairs_checked: int


def audit_geodesic(
    base: GraphOracle, labeling: GeodesicLabeling, window: int = 200, vertex_budget: int = 20_000
) -> GeodesicAudit:
    """Check that ``n -> x_n`` is a geodesic on ``|n| <= window``.

    Consecutive labels must be adjacent and ``locate`` must invert ``embed``.
    ``d(x_0, x_n) = |n|`` is checked by one BFS from x_0, grown layer by layer
    while the ball stays under ``vertex_budget``.
    """
    checked = 0
    for n in range(-window, window + 1):
        v = labeling.embed(n)
        base.check_vertex(v)
        if labeling.locate(v) != n:
            raise GeodesicAuditError(f"locate(embed({n})) = {labeling.locate(v)}")
        if n < window:
            w = labeling.embed(n + 1)
            if w not in base.neighbors(v):
                raise GeodesicAuditError(f"x_{n} and x_{n + 1} are not adjacent")
            checked += 1
    x0 = labeling.embed(0)
    dist = {x0: 0}
    frontier = [x0]
    radius = 0
    while radius < window and frontier:
        nxt = []
        for v in frontier:
            for u in base.neighbors(v):
                if u not in dist:
                    dist[u] = radius + 1
                    nxt.append(u)
        if len(dist) > vertex_budget:
            break
        frontier = nxt
        radius += 1
    for n in range(-radius, radius + 1):
        d = dist.get(labeling.embed(n))
        if d != abs(n):
            raise GeodesicAuditError(f"d(x_0, x_{n}) = {d}, expected {abs(n)}")
        checked += 1
    return GeodesicAudit(window, radius, checked)


# -- decorated oracle ---------------------------------------------------------------


class DecoratedOracle(GraphOracle):
    """X_alpha over ``base``: segment S_n of length g_alpha(n) rooted at x_{n^2}.

    ``Seg(n, k)`` is the k-th vertex of S_n; its 0-th vertex is the base vertex
    x_{n^2} itself.
    """

    def __init__(self, base: GraphOracle, labeling: GeodesicLabeling, params: DecorationParams):
        self.base = base
        self.params = params
        alpha = params.alpha

        def seg_length(n):
            return g_alpha(alpha, n)

        def segment_index(v) -> Optional[int]:
            s = labeling.locate(v)
            if s is None or s < 1:
                return None
            n = isqrt(s)
            return n if n * n == s and seg_length(n) >= 1 else None

        def neighbors(v):
            if v.kind == 0:
                out = base.neighbors(v)
                n = segment_index(v)
                if n is not None:
                    out = list(out) + [Seg(n, 1)]
                return out
            n, k = v.data
            out = [labeling.embed(n * n) if k == 1 else Seg(n, k - 1)]
            if k < seg_length(n):
                out.append(Seg(n, k + 1))
            return out

        def contains(v):
            if v.kind == 0:
                return base.contains(v)
            n, k = v.data
            return n >= 1 and 1 <= k <= seg_length(n)

        fold = None
        if base.fold is not None and base.labeling is labeling:
            base_fold = base.fold

            def fold(c, parent):
                if c.kind == 0 and parent.kind == 0:
                    return base_fold(c, parent)
                return None

        super().__init__(
            neighbors,
            base.degree_bound + 1,
            labeling.embed(0),
            f"decorate:{base.name}:alpha={alpha:g}",
            contains,
            fold=fold,
            acyclic=base.acyclic,
            labeling=labeling,
        )
        self.seg_length = seg_length
        self.segment_index = segment_index

    @property
    def alpha(self):
        return self.params.alpha

    def tip(self, n: int) -> Optional[VertexId]:
        k = self.seg_length(n)
        return Seg(n, k) if k >= 1 else None

    def root(self, n: int) -> VertexId:
        return self.labeling.embed(n * n)


def decorate(
    base: GraphOracle,
    labeling: GeodesicLabeling,
    alpha,
    audit_window: int = 200,
    vertex_budget: int = 20_000,
) -> DecoratedOracle:
    if labeling is None:
        raise GraphError(f"{base.name} has no geodesic labeling")
    params = DecorationParams(alpha)
    audit_geodesic(base, labeling, audit_window, vertex_budget)
    return DecoratedOracle(base, labeling, params)


# -- ratio limits and threshold --------------------------------------------------------


def _poly(coeffs: Sequence, x):
    """Evaluate ``coeffs[0] + coeffs[1] x + ...``."""
    total = 0
    for c in reversed(coeffs):
        total = total * x + c
    return total


def ratio_series(alpha, beta, T, p, xs) -> list[float]:
    """``T(g_alpha(p(x))) / g_beta(x)`` at each x, with ``T = (a, b)`` meaning ``a y + b``.

    ``p`` is a coefficient list in ascending powers.
    """
    if not alpha < beta:
        raise ValueError("need alpha < beta")
    a, b = T
    out = []
    for x in xs:
        px = _poly(p, x)
        if px <= 0:
            raise ValueError(f"p({x}) = {px} is not positive")
        denom = g_alpha(beta, x)
        if denom == 0:
            raise ValueError(f"g_beta({x}) = 0; evaluate at x >= 3")
        out.append(float((a * g_alpha(alpha, px) + b) / denom))
    return out


def _exact(x):
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def threshold_inequality(alpha, beta, L, A, M, D, x: int) -> tuple[int, Fraction, bool]:
    """``(g_beta(x), L g_alpha(L(x + 2x^2 + A)) + A + M + D, lhs > rhs)``."""
    L, A, M, D = (_exact(v) for v in (L, A, M, D))
    lhs = g_alpha(beta, x)
    rhs = L * g_alpha(alpha, L * (x + 2 * x * x + A)) + A + M + D
    return lhs, rhs, lhs > rhs


def find_threshold_N(
    alpha, beta, L, A, M, D, check_factor: int = 10, ceiling: int = 10**7
) -> int:
    """Smallest N with the distinct-alpha inequality true for every integer x in [N, check_factor*N]."""
    if not alpha < beta:
        raise ValueError("need alpha < beta")
    if L < 1 or A < 0 or M < 0 or D < 0:
        raise ValueError("need L >= 1, A >= 0, M >= 0, D >= 0")
    failures: list[int] = []
    checked = 0
    N = 1
    while N <= ceiling:
        hi = check_factor * N
        while checked < hi:
            checked += 1
            if not threshold_inequality(alpha, beta, L, A, M, D, checked)[2]:
                failures.append(checked)
        i = bisect.bisect_right(failures, hi)
        if i == 0 or failures[i - 1] < N:
            return N
        # every N' in [N, f] still has f inside its window
        N = failures[i - 1] + 1
    raise ThresholdNotFound(f"no threshold found below ceiling {ceiling}")


# -- bounded-degree reduction ---------------------------------------------------------


class CubicalOracle(GraphOracle):
    """Each base vertex of degree d >= 4 becomes a path of d gadget vertices.

    Gadget slot i of v is ``Base(*v.data, i)`` and carries the edge to the i-th
    neighbor of v in VertexId order. Requires base coordinates of a fixed length.
    """

    def __init__(self, g: GraphOracle):
        self.original = g
        width = len(g.basepoint.data)

        def nbrs(v):
            return sorted(g.neighbors(v))

        def big(v):
            return v.kind == 0 and len(g.neighbors(v)) >= 4

        def port(u, v):
            if not big(u):
                return u
            return Base(*u.data, nbrs(u).index(v))

        def split(v):
            if v.kind == 0 and len(v.data) == width + 1:
                return Base(*v.data[:-1]), v.data[-1]
            return None

        def neighbors(v):
            s = split(v)
            if s is None:
                return sorted(port(u, v) for u in nbrs(v))
            w, i = s
            around = nbrs(w)
            out = [port(around[i], w)]
            if i > 0:
                out.append(Base(*w.data, i - 1))
            if i < len(around) - 1:
                out.append(Base(*w.data, i + 1))
            return sorted(out)

        def contains(v):
            s = split(v)
            if s is None:
                return g.contains(v) and not big(v)
            w, i = s
            return g.contains(w) and big(w) and 0 <= i < len(g.neighbors(w))

        self.representative = lambda v: Base(*v.data, 0) if big(v) else v
        super().__init__(
            neighbors, 3, self.representative(g.basepoint), f"cubical({g.name})", contains
        )


def cubicalize(g: GraphOracle) -> CubicalOracle:
    return CubicalOracle(g)
