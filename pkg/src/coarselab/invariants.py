"""Growth series, domination checks, ends profiles, and the tree embedding of the spine."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .decorate import DecoratedOracle
from .generators import make_tree, tree_distance, tree_encode
from .graph_core import GraphError, GraphOracle, VertexId, horizon_counts, sphere_sizes


@dataclass
class GrowthSeries:
    basepoint: VertexId
    values: list  # values[n] = |B(x0, n)|
    spheres: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.values)


def growth_series(g: GraphOracle, x0: VertexId, n_max: int) -> GrowthSeries:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    spheres = sphere_sizes(g, x0, n_max)
    values = []
    total = 0
    for s in spheres:
        total += s
        values.append(total)
    return GrowthSeries(x0, values, spheres)


@dataclass
class Domination:
    holds: bool
    first_failure: Optional[int]
    n_checked: int  # n ranges over 0..n_checked-1

    def __bool__(self) -> bool:
        return self.holds


def dominates(f: GrowthSeries, h: GrowthSeries, c: int) -> Domination:
    """``f[n] <= c * h[c*n + c]`` over every n where both sides are available."""
    if c < 1:
        raise ValueError("c must be a positive integer")
    fv, hv = f.values, h.values
    n_range = min(len(fv), (len(hv) - 1 - c) // c + 1) if len(hv) > c else 0
    for n in range(n_range):
        if fv[n] > c * hv[c * n + c]:
            return Domination(False, n, n_range)
    return Domination(True, None, n_range)


@dataclass
class SandwichReport:
    graph: str
    n_max: int
    base_balls: list
    decorated_balls: list
    base_spheres: list
    decorated_spheres: list
    first_violation: Optional[dict]
    sphere_one_equal: bool

    @property
    def passed(self) -> bool:
        return self.first_violation is None and self.sphere_one_equal

    def to_json(self) -> dict:
        return {"pass": self.passed, "first_violation": self.first_violation}


def check_growth_sandwich(base: GraphOracle, decorated: DecoratedOracle, n_max: int) -> SandwichReport:
    """Check ``|B_X| <= |B_Xa| <= 2|B_X|`` and ``|S_Xa| <= |S_X| + 1`` for n <= n_max."""
    x0 = decorated.basepoint
    fb = growth_series(base, x0, n_max)
    fd = growth_series(decorated, x0, n_max)
    violation = None
    for n in range(n_max + 1):
        bx, bd = fb.values[n], fd.values[n]
        sx, sd = fb.spheres[n], fd.spheres[n]
        if bx > bd:
            violation = {"n": n, "inequality": "ball_lower", "base": bx, "decorated": bd}
        elif bd > 2 * bx:
            violation = {"n": n, "inequality": "ball_upper", "base": bx, "decorated": bd}
        elif sd > sx + 1:
            violation = {"n": n, "inequality": "sphere_plus_one", "base": sx, "decorated": sd}
        if violation:
            break
    return SandwichReport(
        decorated.name,
        n_max,
        fb.values,
        fd.values,
        fb.spheres,
        fd.spheres,
        violation,
        fb.spheres[1] == fd.spheres[1],
    )


@dataclass
class EndsProfile:
    rows: list  # (r, R, count) ordered by r then R
    stabilized: dict  # r -> (count, (R_lo, R_hi)) or None
    window: int

    def counts(self, r: int) -> list:
        return [c for rr, _, c in self.rows if rr == r]

    def to_json(self) -> list:
        return [{"r": r, "R": R, "count": c} for r, R, c in self.rows]


def ends_profile(
    g: GraphOracle,
    x0: VertexId,
    r_list: Sequence[int],
    R_max: int,
    window: int = 5,
    threads: int = 1,
) -> EndsProfile:
    """Horizon-component counts for each r and R in r+5..R_max.

    A radius r is stabilized when its last ``window`` counts agree.
    """
    r_list = sorted(set(r_list))
    if R_max <= max(r_list) + window:
        raise ValueError("R_max must exceed max(r_list) + window")

    def one(r):
        return r, horizon_counts(g, x0, r, range(r + 5, R_max + 1))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(one, r_list))
    else:
        results = [one(r) for r in r_list]
    rows = []
    stabilized: dict = {}
    for r, counts in results:
        Rs = sorted(counts)
        rows.extend((r, R, counts[R]) for R in Rs)
        tail = Rs[-window:]
        if len(tail) == window and len({counts[R] for R in tail}) == 1:
            stabilized[r] = (counts[tail[0]], (tail[0], tail[-1]))
        else:
            stabilized[r] = None
    return EndsProfile(rows, stabilized, window)


# -- isometric embedding of the decorated spine into the 3-regular tree ---------------


@dataclass
class TreeEmbedding:
    mapping: dict  # Y vertex -> tree vertex
    pairs_checked: int
    violations: list  # (u, v, d_Y, d_T)

    @property
    def passed(self) -> bool:
        return not self.violations


class EmbeddingAuditError(GraphError):
    pass


def embed_Y_in_tree(decorated: DecoratedOracle, radius: int, strict: bool = True) -> TreeEmbedding:
    """Map Y = geodesic + segments (within ``radius`` of x_0) into the 3-regular tree.

    x_n goes to the tree spine vertex v_n; S_m runs down the ray off v_{m^2}
    whose first letter is 2. Every pair distance in Y is compared with the
    closed-form tree metric.
    """
    if radius < 1:
        raise ValueError("radius must be positive")
    labeling = decorated.labeling
    tree = make_tree(3)
    spine = tree.labeling

    def in_Y(v):
        return v.kind == 1 or labeling.locate(v) is not None

    def y_neighbors(v):
        return [u for u in decorated.neighbors(v) if in_Y(u)]

    def y_bfs(src, cap):
        dist = {src: 0}
        frontier = [src]
        for depth in range(cap):
            nxt = []
            for v in frontier:
                for u in y_neighbors(v):
                    if u not in dist:
                        dist[u] = depth + 1
                        nxt.append(u)
            frontier = nxt
        return dist

    x0 = labeling.embed(0)
    ball = sorted(y_bfs(x0, radius))

    def image(v):
        if v.kind == 0:
            return spine.embed(labeling.locate(v))
        m, k = v.data
        root = [i % 2 for i in range(m * m)]
        ray = [2] + [i % 2 for i in range(k - 1)]
        return tree_encode(root + ray, 3)

    mapping = {v: image(v) for v in ball}
    violations = []
    checked = 0
    for i, u in enumerate(ball):
        dy = y_bfs(u, 2 * radius)
        for v in ball[i + 1:]:
            dt = tree_distance(mapping[u], mapping[v], 3)
            checked += 1
            if dy.get(v) != dt:
                violations.append((u, v, dy.get(v), dt))
    for v in ball:
        tree.check_vertex(mapping[v])
    if strict and violations:
        u, v, dy, dt = violations[0]
        raise EmbeddingAuditError(f"d_Y({u!r}, {v!r}) = {dy} but d_T = {dt}")
    return TreeEmbedding(mapping, checked, violations)
