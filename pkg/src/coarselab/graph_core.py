"""Lazy adjacency oracles for infinite, locally finite graphs and BFS metric queries.

Infinite graphs are never materialized. Every computation works on a finite
BFS snapshot with an explicit radius.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, NamedTuple, Optional, Sequence, Union


class GraphError(ValueError):
    """Raised when an oracle violates its contract (symmetry, degree bound, validity)."""


class VertexId(NamedTuple):
    """Tagged vertex identifier.

    ``kind`` is 0 for a base-graph vertex (``data`` = integer coordinates) and
    1 for a decoration-segment vertex (``data`` = ``(n, k)``). Tuple ordering
    puts every base vertex before every segment vertex and is lexicographic
    within each kind, which is the tie-breaking order used everywhere.
    """

    kind: int
    data: tuple

    @property
    def is_base(self) -> bool:
        return self.kind == 0

    @property
    def is_seg(self) -> bool:
        return self.kind == 1

    def __str__(self) -> str:
        if self.kind == 0:
            return "b:" + ",".join(str(c) for c in self.data)
        return "s:%d:%d" % self.data

    def __repr__(self) -> str:
        if self.kind == 0:
            return "Base%r" % (self.data,)
        return "Seg(%d, %d)" % self.data


def Base(*coords: int) -> VertexId:
    return VertexId(0, tuple(coords))


def Seg(n: int, k: int) -> VertexId:
    if n < 1 or k < 1:
        raise GraphError(f"segment vertex needs n >= 1 and k >= 1, got ({n}, {k})")
    return VertexId(1, (n, k))


def parse_vid(text: str) -> VertexId:
    """Inverse of ``str(VertexId)``: ``b:c1,c2,...`` or ``s:n:k``."""
    text = text.strip()
    try:
        if text.startswith("b:"):
            body = text[2:]
            return Base(*(int(c) for c in body.split(","))) if body else Base()
        if text.startswith("s:"):
            _, n, k = text.split(":")
            return Seg(int(n), int(k))
    except ValueError as exc:
        raise GraphError(f"malformed vertex id {text!r}") from exc
    raise GraphError(f"malformed vertex id {text!r}")


class _AboveCap:
    """Sentinel returned by :func:`distance` when the true distance exceeds the cap."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "AboveCap"

    def __bool__(self) -> bool:
        return False


AboveCap = _AboveCap()
Distance = Union[int, _AboveCap]


@dataclass
class GraphOracle:
    """A symmetric, locally finite neighbor function with a basepoint.

    ``fold(v, parent)`` is optional and only meaningful on acyclic graphs: it
    returns a hashable class for the rooted subtree hanging off the directed
    edge ``parent -> v`` such that equal classes have isomorphic subtrees, or
    ``None`` when the edge is not foldable. Sphere counting uses it to avoid
    materializing exponentially large balls.
    """

    neighbors_fn: Callable[[VertexId], Sequence[VertexId]]
    degree_bound: int
    basepoint: VertexId
    name: str
    contains: Callable[[VertexId], bool] = lambda v: True
    fold: Optional[Callable[[VertexId, VertexId], Optional[Hashable]]] = None
    acyclic: bool = False
    labeling: Optional["object"] = None
    meta: dict = field(default_factory=dict)

    def neighbors(self, v: VertexId) -> list[VertexId]:
        if not self.contains(v):
            raise GraphError(f"{v!r} is not a vertex of {self.name}")
        nbrs = list(self.neighbors_fn(v))
        if len(nbrs) > self.degree_bound:
            raise GraphError(
                f"{self.name}: {v!r} has degree {len(nbrs)} > bound {self.degree_bound}"
            )
        return nbrs

    def check_vertex(self, v: VertexId) -> None:
        if not isinstance(v, VertexId) or not self.contains(v):
            raise GraphError(f"{v!r} is not a vertex of {self.name}")


@dataclass
class FiniteBall:
    center: VertexId
    radius: int
    vertices: list  # (VertexId, dist) sorted by (dist, VertexId)
    edges: list  # (u, v) with u < v, sorted, deduplicated

    @property
    def dist(self) -> dict:
        return dict(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def sphere(self, n: int) -> list[VertexId]:
        return [v for v, d in self.vertices if d == n]

    def to_edge_list(self) -> str:
        """Snapshot text: a header line then one ``<vid> <vid>`` line per edge."""
        lines = [f"# center={self.center} radius={self.radius}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"


def _bfs_layers(g: GraphOracle, x0: VertexId, r: int, nbr_cache: dict) -> dict:
    dist = {x0: 0}
    frontier = [x0]
    for depth in range(r):
        nxt = []
        for v in frontier:
            nbrs = nbr_cache.get(v)
            if nbrs is None:
                nbrs = nbr_cache[v] = g.neighbors(v)
            for u in nbrs:
                if u not in dist:
                    dist[u] = depth + 1
                    nxt.append(u)
        frontier = nxt
        if not frontier:
            break
    return dist


def bfs_ball(g: GraphOracle, x0: VertexId, r: int) -> FiniteBall:
    """All vertices within distance ``r`` of ``x0`` with exact distances and induced edges.

    Symmetry of the oracle is checked on every induced edge.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    g.check_vertex(x0)
    nbr_cache: dict = {}
    dist = _bfs_layers(g, x0, r, nbr_cache)
    edges = set()
    for v in dist:
        nbrs = nbr_cache.get(v)
        if nbrs is None:
            nbrs = nbr_cache[v] = g.neighbors(v)
        for u in nbrs:
            if u not in dist:
                continue
            back = nbr_cache.get(u)
            if back is None:
                back = nbr_cache[u] = g.neighbors(u)
            if v not in back:
                raise GraphError(f"{g.name}: asymmetric adjacency {v!r} -> {u!r}")
            edges.add((v, u) if v < u else (u, v))
    vertices = sorted(dist.items(), key=lambda item: (item[1], item[0]))
    return FiniteBall(x0, r, vertices, sorted(edges))


def sphere_sizes(g: GraphOracle, x0: VertexId, n_max: int) -> list[int]:
    """``[|S(x0,0)|, ..., |S(x0,n_max)|]``.

    On acyclic oracles with a ``fold`` the BFS frontier is a multiset of
    directed-edge classes, so trees of any depth are counted exactly.
    """
    g.check_vertex(x0)
    if g.fold is None or not g.acyclic:
        dist = _bfs_layers(g, x0, n_max, {})
        sizes = [0] * (n_max + 1)
        for d in dist.values():
            sizes[d] += 1
        return sizes
    sizes = [1]
    # class key -> [representative vertex, its parent, multiplicity]
    states: dict = {("root", x0): [x0, None, 1]}
    for _ in range(n_max):
        nxt: dict = {}
        for v, parent, mult in states.values():
            for c in g.neighbors(v):
                if c == parent:
                    continue
                key = g.fold(c, v)
                if key is None:
                    key = ("edge", v, c)
                slot = nxt.get(key)
                if slot is None:
                    nxt[key] = [c, v, mult]
                else:
                    slot[2] += mult
        states = nxt
        sizes.append(sum(s[2] for s in states.values()))
    return sizes


def distance(g: GraphOracle, u: VertexId, v: VertexId, cap: int) -> Distance:
    """Exact ``d(u, v)`` by level-synchronous bidirectional BFS, or ``AboveCap``."""
    g.check_vertex(u)
    g.check_vertex(v)
    if u == v:
        return 0
    if cap <= 0:
        return AboveCap
    du, dv = {u: 0}, {v: 0}
    fu, fv = [u], [v]
    depth_u = depth_v = 0
    while fu and fv and depth_u + depth_v < cap:
        # expand the smaller frontier
        if len(fu) <= len(fv):
            frontier, seen, other, depth = fu, du, dv, depth_u
        else:
            frontier, seen, other, depth = fv, dv, du, depth_v
        best = None
        nxt = []
        for w in frontier:
            for x in g.neighbors(w):
                if x in seen:
                    continue
                seen[x] = depth + 1
                nxt.append(x)
                if x in other:
                    cand = depth + 1 + other[x]
                    if best is None or cand < best:
                        best = cand
        if frontier is fu:
            fu, depth_u = nxt, depth_u + 1
        else:
            fv, depth_v = nxt, depth_v + 1
        if best is not None:
            return best if best <= cap else AboveCap
    return AboveCap


def distances_from(g: GraphOracle, u: VertexId, cap: int) -> dict:
    """Single-source exact distances to every vertex within ``cap``."""
    g.check_vertex(u)
    return _bfs_layers(g, u, cap, {})


@dataclass
class Component:
    vertices: tuple  # sorted
    touches_horizon: bool

    @property
    def least(self) -> VertexId:
        return self.vertices[0]


def _components(vertex_set: Iterable[VertexId], adjacency: Callable) -> list[list]:
    remaining = set(vertex_set)
    comps = []
    for start in sorted(remaining):
        if start not in remaining:
            continue
        remaining.discard(start)
        comp = [start]
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in adjacency(v):
                if u in remaining:
                    remaining.discard(u)
                    comp.append(u)
                    queue.append(u)
        comps.append(sorted(comp))
    return comps


def boundary_components(g: GraphOracle, x0: VertexId, r: int, R: int) -> list[Component]:
    """Components of the subgraph induced on ``B(x0,R) \\ B(x0,r)``.

    ``touches_horizon`` marks components reaching the sphere ``S(x0,R)``; the
    rest are provably bounded. Sorted by least contained vertex.
    """
    if R <= r:
        raise ValueError("need R > r")
    nbr_cache: dict = {}
    dist = _bfs_layers(g, x0, R, nbr_cache)
    shell = {v for v, d in dist.items() if d > r}

    def adjacency(v):
        nbrs = nbr_cache.get(v)
        if nbrs is None:
            nbrs = nbr_cache[v] = g.neighbors(v)
        return nbrs

    return [
        Component(tuple(c), any(dist[v] == R for v in c))
        for c in _components(shell, adjacency)
    ]


def horizon_counts(g: GraphOracle, x0: VertexId, r: int, R_values: Sequence[int]) -> dict:
    """Horizon-component counts of ``B(x0,R) \\ B(x0,r)`` for every R, from one BFS.

    Layers are added to a union-find in order of distance; the count at R is the
    number of distinct roots among vertices at distance exactly R.
    """
    R_values = sorted(set(R_values))
    if not R_values:
        return {}
    if R_values[0] <= r:
        raise ValueError("every R must exceed r")
    nbr_cache: dict = {}
    dist = _bfs_layers(g, x0, R_values[-1], nbr_cache)
    layers: dict = {}
    for v, d in dist.items():
        if d > r:
            layers.setdefault(d, []).append(v)
    parent: dict = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    out = {}
    wanted = set(R_values)
    for depth in range(r + 1, R_values[-1] + 1):
        layer = layers.get(depth, [])
        for v in layer:
            parent[v] = v
        for v in layer:
            nbrs = nbr_cache.get(v)
            if nbrs is None:
                nbrs = nbr_cache[v] = g.neighbors(v)
            for u in nbrs:
                if u in parent:
                    ru, rv = find(u), find(v)
                    if ru != rv:
                        if ru < rv:
                            parent[rv] = ru
                        else:
                            parent[ru] = rv
        if depth in wanted:
            out[depth] = len({find(v) for v in layer})
    return out


@dataclass
class FiniteMetric:
    """Ordered point list with a symmetric integer distance table (``None`` = infinite)."""

    points: list
    dist: list  # list of lists

    def __post_init__(self):
        self.index = {p: i for i, p in enumerate(self.points)}

    def __len__(self) -> int:
        return len(self.points)

    def d(self, a, b) -> Optional[int]:
        return self.dist[self.index[a]][self.index[b]]

    @property
    def diameter(self) -> int:
        return max((x for row in self.dist for x in row if x is not None), default=0)

    def check(self) -> None:
        n = len(self.points)
        for i in range(n):
            if self.dist[i][i] != 0:
                raise GraphError(f"d({self.points[i]!r}, itself) != 0")
            for j in range(n):
                if self.dist[i][j] != self.dist[j][i]:
                    raise GraphError("distance table is not symmetric")
        for k in range(n):
            for i in range(n):
                dik = self.dist[i][k]
                if dik is None:
                    continue
                for j in range(n):
                    dkj = self.dist[k][j]
                    if dkj is None:
                        continue
                    dij = self.dist[i][j]
                    if dij is None or dij > dik + dkj:
                        raise GraphError("triangle inequality fails")

    def restrict(self, subset: Sequence) -> "FiniteMetric":
        idx = [self.index[p] for p in subset]
        return FiniteMetric(list(subset), [[self.dist[i][j] for j in idx] for i in idx])

    def relabel(self, mapping: Callable) -> "FiniteMetric":
        return FiniteMetric([mapping(p) for p in self.points], [row[:] for row in self.dist])


def metric_from_edges(points: Sequence, edges: Iterable[tuple]) -> FiniteMetric:
    """Path metric of a finite graph given as a vertex list and edge list."""
    points = list(points)
    adj: dict = {p: [] for p in points}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    index = {p: i for i, p in enumerate(points)}
    n = len(points)
    table = [[None] * n for _ in range(n)]
    for i, p in enumerate(points):
        table[i][i] = 0
        queue = deque([p])
        while queue:
            v = queue.popleft()
            dv = table[i][index[v]]
            for u in adj[v]:
                j = index[u]
                if table[i][j] is None:
                    table[i][j] = dv + 1
                    queue.append(u)
    return FiniteMetric(points, table)


def subspace_metric(g: GraphOracle, points: Sequence[VertexId]) -> FiniteMetric:
    """Metric of ``g`` restricted to ``points`` (distances measured in all of ``g``).

    Assumes the points are at pairwise finite distance; each row is one BFS out
    to the farthest point.
    """
    points = sorted(points)
    targets = set(points)
    table = []
    for p in points:
        dist = {p: 0}
        frontier = [p]
        depth = 0
        found = 1
        while found < len(targets) and frontier:
            nxt = []
            for v in frontier:
                for u in g.neighbors(v):
                    if u not in dist:
                        dist[u] = depth + 1
                        nxt.append(u)
                        if u in targets:
                            found += 1
            frontier = nxt
            depth += 1
        table.append([dist.get(q) for q in points])
    return FiniteMetric(points, table)


def ball_metric(g: GraphOracle, x: VertexId, R: int) -> FiniteMetric:
    """Subspace metric on ``B_g(x, R)``: the domain used for local QI searches."""
    ball = bfs_ball(g, x, R)
    return subspace_metric(g, [v for v, _ in ball.vertices])


def shortest_path(g: GraphOracle, u: VertexId, v: VertexId, cap: int) -> Optional[list]:
    """A geodesic from u to v; among geodesics, the one whose parents are least in VertexId order."""
    if u == v:
        return [u]
    dist = {u: 0}
    frontier = [u]
    depth = 0
    while frontier and depth < cap and v not in dist:
        nxt = []
        for w in frontier:
            for x in g.neighbors(w):
                if x not in dist:
                    dist[x] = depth + 1
                    nxt.append(x)
        frontier = nxt
        depth += 1
    if v not in dist:
        return None
    path = [v]
    cur = v
    while cur != u:
        cur = min(x for x in g.neighbors(cur) if dist.get(x) == dist[cur] - 1)
        path.append(cur)
    return path[::-1]
