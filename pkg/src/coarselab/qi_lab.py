"""Finite-scale feasibility of (L, A)-quasi-isometric embeddings.

Constants are handled as exact rationals. Distances are integers, so each
pairwise constraint ``d/L - A <= d' <= L d + A`` is compiled to an integer
interval once, before the search starts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .graph_core import (
    AboveCap,
    FiniteMetric,
    GraphError,
    GraphOracle,
    VertexId,
    ball_metric,
    bfs_ball,
    distance,
    distances_from,
)

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    def __init__(self, nodes: int, budget: int):
        super().__init__(f"search budget of {budget} nodes exceeded")
        self.nodes = nodes
        self.budget = budget


class WindowTooSmall(ValueError):
    pass


class CapTooSmall(ValueError):
    pass


def default_budget() -> int:
    env = os.environ.get("COARSELAB_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def int_bounds(d: int, L: Fraction, A: Fraction) -> tuple[int, int]:
    """Integer interval of admissible image distances for a domain distance d."""
    return max(0, math.ceil(d / L - A)), math.floor(L * d + A)


def _fmt(x: Fraction):
    return x.numerator if x.denominator == 1 else str(x)


@dataclass
class QIMap:
    domain: FiniteMetric
    assignment: dict  # domain point -> VertexId; partial during search
    L: Fraction
    A: Fraction
    audited: bool = False

    def __post_init__(self):
        self.L = as_fraction(self.L)
        self.A = as_fraction(self.A)
        if self.L < 1 or self.A < 0:
            raise ValueError("need L >= 1 and A >= 0")

    def __call__(self, p) -> VertexId:
        return self.assignment[p]

    @property
    def total(self) -> bool:
        return all(p in self.assignment for p in self.domain.points)

    def with_constants(self, L, A) -> "QIMap":
        return QIMap(self.domain, dict(self.assignment), L, A)

    def to_json(self) -> dict:
        return {
            "L": _fmt(self.L),
            "A": _fmt(self.A),
            "assignment": [[str(p), str(self.assignment[p])] for p in self.domain.points],
        }


@dataclass
class Violation:
    a: object
    b: object
    side: str  # "lower" or "upper"
    domain_distance: int
    image_distance: object

    def __bool__(self) -> bool:
        return False


def check_qi(qmap: QIMap, codomain: GraphOracle, cap: Optional[int] = None):
    """Audit both QI inequalities over all pairs; ``True`` or the worst ``Violation``.

    The worst violation is the one furthest outside its bound, earliest pair
    first on ties. With the default cap (``L * diam + A``) a distance beyond
    the cap is itself an upper-side violation, and counts as the worst.
    """
    pts = qmap.domain.points
    missing = [p for p in pts if p not in qmap.assignment]
    if missing:
        raise ValueError(f"assignment is partial; unassigned: {missing[:3]!r}")
    bound = math.floor(qmap.L * qmap.domain.diameter + qmap.A)
    if cap is None:
        cap = bound
    rows: dict = {}
    worst, excess = None, 0
    for i, a in enumerate(pts):
        fa = qmap.assignment[a]
        if fa not in rows:
            rows[fa] = distances_from(codomain, fa, cap)
        for b in pts[i + 1:]:
            d = qmap.domain.dist[i][qmap.domain.index[b]]
            lo, hi = int_bounds(d, qmap.L, qmap.A)
            dy = rows[fa].get(qmap.assignment[b], AboveCap)
            if dy is AboveCap:
                if cap < hi:
                    raise CapTooSmall(
                        f"distance between images of {a!r}, {b!r} exceeds cap {cap}; use cap >= {bound}"
                    )
                if excess != math.inf:
                    worst, excess = Violation(a, b, "upper", d, AboveCap), math.inf
            elif dy < lo and lo - dy > excess:
                worst, excess = Violation(a, b, "lower", d, dy), lo - dy
            elif dy > hi and dy - hi > excess:
                worst, excess = Violation(a, b, "upper", d, dy), dy - hi
    if worst is not None:
        return worst
    qmap.audited = True
    return True


def adjust_pin(qmap: QIMap, x, y: VertexId, K, codomain: GraphOracle) -> QIMap:
    """Move the image of ``x`` to ``y``; a (K,K) map becomes a (K,2K) map."""
    K = as_fraction(K)
    base = qmap.with_constants(K, K)
    if check_qi(base, codomain) is not True:
        raise ValueError("map does not audit as a (K, K) quasi-isometric embedding")
    d = distance(codomain, qmap.assignment[x], y, math.floor(K))
    if d is AboveCap:
        raise ValueError(f"d(f(x), y) exceeds K = {K}")
    assignment = dict(qmap.assignment)
    assignment[x] = y
    pinned = QIMap(qmap.domain, assignment, K, 2 * K)
    if check_qi(pinned, codomain) is not True:
        raise AssertionError("pinned map failed its (K, 2K) audit")
    return pinned


# -- exhaustive pinned search -------------------------------------------------------


@dataclass
class Found:
    map: QIMap
    nodes: int
    window: tuple
    pins: tuple = ()

    outcome = "found"

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "nodes": self.nodes,
            "pins": [[str(p), str(v)] for p, v in self.pins],
            "window": {"center": str(self.window[0]), "radius": self.window[1]},
            **self.map.to_json(),
        }


@dataclass
class RefutedByExhaustion:
    nodes: int
    window: tuple
    L: Fraction = Fraction(1)
    A: Fraction = Fraction(0)
    pins: tuple = ()

    outcome = "refuted"

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "nodes": self.nodes,
            "pins": [[str(p), str(v)] for p, v in self.pins],
            "window": {"center": str(self.window[0]), "radius": self.window[1]},
            "L": _fmt(self.L),
            "A": _fmt(self.A),
        }


class _Distances:
    """Lazy exact codomain distances between vertices of a finite universe."""

    def __init__(self, g: GraphOracle, cap: int):
        self.g = g
        self.cap = cap
        self.rows: dict = {}

    def row(self, v):
        r = self.rows.get(v)
        if r is None:
            r = self.rows[v] = distances_from(self.g, v, self.cap)
        return r


class _Search:
    def __init__(self, domain, codomain, L, A, pins, universe, dist):
        self.domain = domain
        self.L, self.A = L, A
        self.dist = dist
        self.universe = universe
        p0 = pins[0][0]
        pinned = [p for p, _ in pins]
        rest = sorted(
            (p for p in domain.points if p not in set(pinned)),
            key=lambda p: (domain.d(p0, p), p),
        )
        self.order = pinned + rest
        self.pins = dict(pins)
        n = len(self.order)
        idx = [domain.index[p] for p in self.order]
        # bounds[i][j] for j < i: admissible image distance between order[i] and order[j]
        self.bounds = [
            [int_bounds(domain.dist[idx[i]][idx[j]], L, A) for j in range(i)] for i in range(n)
        ]
        self.anchor = []
        for i in range(n):
            if i == 0:
                self.anchor.append(None)
                continue
            self.anchor.append(min(range(i), key=lambda j: (domain.dist[idx[i]][idx[j]], j)))

    def candidates(self, i, images):
        if self.order[i] in self.pins:
            return [self.pins[self.order[i]]]
        j = self.anchor[i]
        hi = self.bounds[i][j][1]
        row = self.dist.row(images[j])
        return sorted(v for v, d in row.items() if d <= hi and v in self.universe)

    def consistent(self, i, v, images):
        bounds = self.bounds[i]
        row = self.dist.row(v)
        for j in range(i):
            d = row.get(images[j])
            lo, hi = bounds[j]
            if d is None or d < lo or d > hi:
                return False
        return True

    def run(self, start: int, images: list, budget: int):
        """DFS from position ``start``; returns ``(images or None, nodes)``.

        Raises ``BudgetExceeded`` once more than ``budget`` nodes are placed.
        """
        n = len(self.order)
        nodes = 0
        stack = [(start, iter(self.candidates(start, images)))] if start < n else []
        if start >= n:
            return list(images), 0
        while stack:
            i, it = stack[-1]
            for v in it:
                if self.consistent(i, v, images):
                    nodes += 1
                    if nodes > budget:
                        raise BudgetExceeded(nodes, budget)
                    del images[i:]
                    images.append(v)
                    if i + 1 == n:
                        return list(images), nodes
                    stack.append((i + 1, iter(self.candidates(i + 1, images))))
                    break
            else:
                stack.pop()
                del images[i:]
        return None, nodes


def search_embedding(
    domain: FiniteMetric,
    codomain: GraphOracle,
    window: Optional[tuple],
    L,
    A,
    pins: Sequence[tuple],
    budget: Optional[int] = None,
    threads: int = 1,
    auto_widen: bool = True,
):
    """Exhaustive search for an (L, A)-quasi-isometric embedding extending ``pins``.

    Every admissible image of p lies within ``L d(p, p0) + A`` of the first
    pin's image, so once the window covers that ball a failed search is a
    refutation over all of the codomain. Returns ``Found`` (least assignment in
    DFS order, fully audited) or ``RefutedByExhaustion``.
    """
    L, A = as_fraction(L), as_fraction(A)
    if L < 1 or A < 0:
        raise ValueError("need L >= 1 and A >= 0")
    if not pins:
        raise ValueError("at least one pin is required")
    budget = default_budget() if budget is None else budget
    for p, v in pins:
        if p not in domain.index:
            raise ValueError(f"pin {p!r} is not a domain point")
        codomain.check_vertex(v)
    p0, y0 = pins[0]
    reach = max(domain.d(p0, p) for p in domain.points)
    required = math.floor(L * reach + A)
    if window is None:
        window = (y0, required)
    center, radius = window
    offset = 0 if center == y0 else distance(codomain, center, y0, radius)
    if offset is AboveCap or radius < offset + required:
        need = required if offset is AboveCap else offset + required
        if not auto_widen:
            raise WindowTooSmall(
                f"window radius {radius} does not cover the admissible ball (need {need})"
            )
        if offset is AboveCap:
            center, radius = y0, required
        else:
            radius = need
    window = (center, radius)

    universe = {v for v, _ in bfs_ball(codomain, y0, required).vertices}
    search = _Search(domain, codomain, L, A, list(pins), universe, _Distances(codomain, 2 * required))

    # pinned prefix
    images: list = []
    nodes = 0
    for i in range(len(pins)):
        v = search.candidates(i, images)[0]
        if not search.consistent(i, v, images):
            return RefutedByExhaustion(nodes, window, L, A, tuple(pins))
        nodes += 1
        images.append(v)
    start = len(pins)
    n = len(search.order)
    if start == n:
        result, extra = list(images), 0
    else:
        branches = [v for v in search.candidates(start, images) if search.consistent(start, v, images)]
        try:
            result, extra = _run_branches(search, start, images, branches, budget - nodes, threads)
        except BudgetExceeded as exc:
            raise BudgetExceeded(nodes + exc.nodes, budget) from None
    nodes += extra
    if result is None:
        return RefutedByExhaustion(nodes, window, L, A, tuple(pins))
    qmap = QIMap(domain, dict(zip(search.order, result)), L, A)
    if check_qi(qmap, codomain) is not True:
        raise AssertionError("search produced a map that fails the full audit")
    return Found(qmap, nodes, window, tuple(pins))


def _run_branches(search, start, images, branches, budget, threads):
    """Explore top-level branches; the result matches a sequential DFS in order."""

    def one(v, limit):
        branch_images = list(images) + [v]
        try:
            res, k = search.run(start + 1, branch_images, limit)
        except BudgetExceeded as exc:
            return None, exc.nodes, True
        return res, k, False

    if threads > 1 and len(branches) > 1:
        # a fresh distance cache per worker would repeat BFS work; the shared one
        # is only ever filled with identical values, so races are benign
        with ThreadPoolExecutor(threads) as pool:
            outcomes = list(pool.map(lambda v: one(v, budget), branches))
    else:
        outcomes = None
    used = 0
    for idx, v in enumerate(branches):
        used += 1
        if used > budget:
            raise BudgetExceeded(used, budget)
        if outcomes is None:
            res, k, blown = one(v, budget - used)
        else:
            res, k, blown = outcomes[idx]
        if blown or used + k > budget:
            raise BudgetExceeded(used + k, budget)
        used += k
        if res is not None:
            return res, used
    return None, used


# -- endpoint order census ------------------------------------------------------------


@dataclass
class Census:
    n: int
    L: Fraction
    A: Fraction
    feasible_count: int
    order_violations: int
    rigid_count: int  # maps k -> k or k -> -k
    examples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "L": _fmt(self.L),
            "A": _fmt(self.A),
            "feasible_count": self.feasible_count,
            "order_violations": self.order_violations,
            "rigid_count": self.rigid_count,
            "translation_normalized": True,
            "violation_examples": self.examples,
        }


def endpoint_order_census(n: int, L, A, budget: Optional[int] = None, keep_examples: int = 3) -> Census:
    """Enumerate every (L, A)-QI embedding ``[-n, n] -> Z`` with f(0) = 0.

    Fixing f(0) loses nothing because Z is translation invariant. A map
    violates the endpoint order when neither ``f(-n) < f(0) < f(n)`` nor
    ``f(n) < f(0) < f(-n)`` holds.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    L, A = as_fraction(L), as_fraction(A)
    budget = default_budget() if budget is None else budget
    step = math.floor(L + A)
    worst = (2 * step + 1) ** (2 * n)
    if worst > budget:
        raise BudgetExceeded(worst, budget)
    # assignment order 0, 1..n, -1..-n; each point hangs off its inner neighbor
    order = [0] + list(range(1, n + 1)) + list(range(-1, -n - 1, -1))
    pos = {k: i for i, k in enumerate(order)}
    bounds = [[int_bounds(abs(order[i] - order[j]), L, A) for j in range(i)] for i in range(len(order))]
    parent = [None] + [pos[k - 1] if k > 0 else pos[k + 1] for k in order[1:]]

    feasible = violations = rigid = 0
    examples: list = []
    vals = [0] * len(order)

    def extend(i):
        nonlocal feasible, violations, rigid
        if i == len(order):
            feasible += 1
            f = dict(zip(order, vals))
            if not (f[-n] < 0 < f[n] or f[n] < 0 < f[-n]):
                violations += 1
                if len(examples) < keep_examples:
                    examples.append([f[k] for k in range(-n, n + 1)])
            if all(f[k] == k for k in f) or all(f[k] == -k for k in f):
                rigid += 1
            return
        centre = vals[parent[i]]
        for v in range(centre - step, centre + step + 1):
            ok = True
            for j in range(i):
                lo, hi = bounds[i][j]
                d = abs(v - vals[j])
                if d < lo or d > hi:
                    ok = False
                    break
            if ok:
                vals[i] = v
                extend(i + 1)

    extend(1)
    return Census(n, L, A, feasible, violations, rigid, examples)


# -- coarse transitivity ----------------------------------------------------------------


@dataclass
class Refuted:
    x: VertexId
    y: VertexId
    K: Fraction
    R: int
    domain_size: int
    attempts: list  # (pinned image, nodes)

    outcome = "refuted"

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "x": str(self.x),
            "y": str(self.y),
            "K": _fmt(self.K),
            "R": self.R,
            "domain_size": self.domain_size,
            "attempts": [{"pin": str(v), "nodes": k} for v, k in self.attempts],
        }


@dataclass
class Inconclusive:
    x: VertexId
    y: VertexId
    K: Fraction
    R: int
    found: Optional[Found]
    note: str

    outcome = "inconclusive"

    def to_json(self) -> dict:
        out = {
            "outcome": self.outcome,
            "x": str(self.x),
            "y": str(self.y),
            "K": _fmt(self.K),
            "R": self.R,
            "note": self.note,
        }
        if self.found is not None:
            out["found"] = self.found.to_json()
        return out


def refute_coarse_transitivity(
    g: GraphOracle, x: VertexId, y: VertexId, K, R: int, budget: Optional[int] = None, threads: int = 1
):
    """Try to show no (K,K)-QI self-map of ``g`` sends x within K of y.

    Restrictions of QI embeddings are QI embeddings with the same constants,
    so it suffices to refute every (K,K) embedding of the subspace B(x, R)
    with x pinned to some y' in B(y, K). A found local map proves nothing
    global, hence ``Inconclusive``.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    K = as_fraction(K)
    budget = default_budget() if budget is None else budget
    domain = ball_metric(g, x, R)
    targets = [v for v, _ in bfs_ball(g, y, math.floor(K)).vertices]
    attempts = []
    spent = 0
    for target in sorted(targets):
        try:
            out = search_embedding(domain, g, None, K, K, [(x, target)], budget - spent, threads)
        except BudgetExceeded:
            return Inconclusive(x, y, K, R, None, f"budget of {budget} nodes exhausted at pin {target}")
        spent += out.nodes
        if isinstance(out, Found):
            return Inconclusive(x, y, K, R, out, f"local map found with x -> {target}")
        attempts.append((target, out.nodes))
    return Refuted(x, y, K, R, len(domain), attempts)


# -- proximity to the base graph -------------------------------------------------------


@dataclass
class ProximityAudit:
    sup_distance_to_base: int
    bound: Fraction
    witness: object

    @property
    def passed(self) -> bool:
        return self.sup_distance_to_base <= self.bound

    def to_json(self) -> dict:
        return {
            "sup_distance_to_base": self.sup_distance_to_base,
            "bound": _fmt(self.bound),
            "pass": self.passed,
            "witness": str(self.witness),
        }


def distance_to_base(g: GraphOracle, v: VertexId, cap: int = 10**6) -> int:
    if v.kind == 0:
        return 0
    seen = {v}
    frontier = [v]
    for depth in range(1, cap + 1):
        nxt = []
        for w in frontier:
            for u in g.neighbors(w):
                if u.kind == 0:
                    return depth
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
        if not frontier:
            break
    raise GraphError(f"no base vertex within {cap} of {v!r}")


def base_proximity_audit(qmap: QIMap, L, A, codomain: GraphOracle) -> ProximityAudit:
    """``max_x d(f(x), X)`` against the bound ``L^3 + 2 L^2 A + A``."""
    if not qmap.audited:
        raise ValueError("map must pass check_qi before the proximity audit")
    L, A = as_fraction(L), as_fraction(A)
    if (L, A) != (qmap.L, qmap.A) and check_qi(qmap.with_constants(L, A), codomain) is not True:
        raise ValueError(f"map is not an ({L}, {A}) quasi-isometric embedding")
    bound = L**3 + 2 * L**2 * A + A
    best, witness = -1, None
    for p in qmap.domain.points:
        d = distance_to_base(codomain, qmap.assignment[p])
        if d > best:
            best, witness = d, p
    return ProximityAudit(best, bound, witness)
