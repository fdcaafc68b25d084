"""Ball chains: the constructive quasi-isometry from Z onto a two-ended graph."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .graph_core import (
    FiniteMetric,
    GraphError,
    GraphOracle,
    VertexId,
    boundary_components,
    distances_from,
    horizon_counts,
    shortest_path,
)
from .qi_lab import QIMap, check_qi


class ChainError(GraphError):
    pass


def find_separation_radius(
    g: GraphOracle, samples: Sequence[VertexId], R: int, r_max: int, r_min: int = 1
) -> Optional[int]:
    """Least r in [r_min, r_max] for which every sampled ball of radius r leaves exactly two horizon components.

    Returns ``None`` when no such r exists.
    """
    for r in range(r_min, r_max + 1):
        if r >= R:
            break
        if all(horizon_counts(g, c, r, [R])[R] == 2 for c in samples):
            return r
    return None


@dataclass
class ChainResult:
    r: int
    x: dict  # k -> VertexId
    horizon: int
    side_labels: dict = field(default_factory=dict)  # k -> "P" / "N" / "origin"

    @property
    def step(self) -> int:
        return 2 * self.r + 1

    @property
    def k_min(self) -> int:
        return min(self.x)

    @property
    def k_max(self) -> int:
        return max(self.x)

    def to_json(self) -> list:
        return [[k, str(self.x[k])] for k in sorted(self.x)]


def _split(g, center, r, horizon, k):
    comps = [c for c in boundary_components(g, center, r, horizon) if c.touches_horizon]
    if len(comps) != 2:
        raise ChainError(
            f"ball of radius {r} at chain index {k} leaves {len(comps)} horizon components, not 2"
        )
    return comps


def _next_point(g, center, r, forward, k):
    dist = distances_from(g, center, 2 * r + 1)
    members = set(forward.vertices)
    cands = sorted(v for v, d in dist.items() if d == 2 * r + 1 and v in members)
    if not cands:
        raise ChainError(f"no vertex at distance {2 * r + 1} on the forward side at index {k}")
    return cands[0]


def build_chain(g: GraphOracle, x0: VertexId, r: int, k_range: tuple[int, int]) -> ChainResult:
    """Chain ``x_k`` with ``d(x_k, x_{k+1}) = 2r + 1`` built through separating balls.

    At ``x_0`` the horizon component holding the least horizon vertex is P_0.
    Each later point is the least vertex at distance 2r+1 inside the component
    away from the previous point, and every earlier chain point is confirmed
    to sit on the other side of the current ball.
    """
    k_min, k_max = k_range
    if not k_min <= 0 <= k_max:
        raise ValueError("k_range must contain 0")
    if r < 1:
        raise ValueError("r must be >= 1")
    step = 2 * r + 1
    horizon = step * (k_max - k_min) + 10 * r
    comps = _split(g, x0, r, horizon, 0)
    dist0 = distances_from(g, x0, horizon)
    least = min(v for c in comps for v in c.vertices if dist0[v] == horizon)
    P0, N0 = comps if least in set(comps[0].vertices) else comps[::-1]

    x = {0: x0}
    labels = {0: "origin"}
    for sign, first_side, label in ((1, P0, "P"), (-1, N0, "N")):
        last = k_max if sign > 0 else k_min
        if last == 0:
            continue
        x[sign] = _next_point(g, x0, r, first_side, 0)
        labels[sign] = label
        k = sign
        while k != last:
            center, back = x[k], x[k - sign]
            comps = _split(g, center, r, horizon, k)
            back_side = [c for c in comps if back in set(c.vertices)]
            if len(back_side) != 1:
                raise ChainError(f"x_{k - sign} is not in a horizon component of the ball at index {k}")
            back_comp = back_side[0]
            forward = comps[1] if comps[0] is back_comp else comps[0]
            members = set(back_comp.vertices)
            j = k - sign
            while j in x and j * sign >= 0:
                if x[j] not in members:
                    raise ChainError(f"x_{j} is not separated from the forward side at index {k}")
                j -= sign
            x[k + sign] = _next_point(g, center, r, forward, k)
            labels[k + sign] = label
            k += sign
    return ChainResult(r, dict(sorted(x.items())), horizon, dict(sorted(labels.items())))


@dataclass
class ChainAudit:
    r: int
    bilipschitz_ok: bool
    first_bilipschitz_failure: Optional[tuple]
    disjoint_ok: bool
    separation_ok: bool
    qi_ok: bool
    window_radius: int
    effective_radius: int
    max_gap_chain: int
    max_gap_paths: int
    gap_histogram: dict

    @property
    def surjectivity_bound(self) -> int:
        return 3 * self.r + 1

    @property
    def passed(self) -> bool:
        return (
            self.bilipschitz_ok
            and self.disjoint_ok
            and self.separation_ok
            and self.qi_ok
            and self.max_gap_chain <= self.surjectivity_bound
        )

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "pass": self.passed,
            "bilipschitz": {
                "ok": self.bilipschitz_ok,
                "lower": "n-m",
                "upper": f"{2 * self.r + 1}(n-m)",
                "first_failure": self.first_bilipschitz_failure,
            },
            "balls_disjoint": self.disjoint_ok,
            "monotone_separation": self.separation_ok,
            "qi_embedding": self.qi_ok,
            "surjectivity": {
                "window_radius": self.window_radius,
                "effective_radius": self.effective_radius,
                "bound": self.surjectivity_bound,
                "max_gap_to_chain": self.max_gap_chain,
                "max_gap_to_paths": self.max_gap_paths,
                "histogram": {str(k): v for k, v in sorted(self.gap_histogram.items())},
            },
        }


def _multi_source(g, sources, cap):
    dist = {s: 0 for s in sources}
    frontier = list(dist)
    for depth in range(cap):
        nxt = []
        for v in frontier:
            for u in g.neighbors(v):
                if u not in dist:
                    dist[u] = depth + 1
                    nxt.append(u)
        frontier = nxt
    return dist


def audit_chain(chain: ChainResult, g: GraphOracle, window_radius: int) -> ChainAudit:
    """Bi-Lipschitz bounds, disjointness, separation, and the surjectivity gap of a chain.

    The gap is measured on B(x_0, w) with w the smaller of ``window_radius``
    and the distance from x_0 to either end of the chain.
    """
    r, step = chain.r, chain.step
    ks = sorted(chain.x)
    span = step * (ks[-1] - ks[0])
    rows = {k: distances_from(g, chain.x[k], span) for k in ks}

    bil_ok, first_fail = True, None
    disjoint = True
    for i, m in enumerate(ks):
        for n in ks[i + 1:]:
            d = rows[m].get(chain.x[n])
            if d is None or not (n - m) <= d <= step * (n - m):
                if bil_ok:
                    first_fail = (m, n, d)
                bil_ok = False
            if d is None or d <= 2 * r:
                disjoint = False

    # every geodesic the BFS produces between x_m and x_n meets B(x_j, r) for m < j < n
    separation = True
    for i, m in enumerate(ks):
        for n in ks[i + 2:]:
            path = shortest_path(g, chain.x[m], chain.x[n], span)
            if path is None:
                separation = False
                continue
            for j in range(m + 1, n):
                if not any(rows[j].get(v, r + 1) <= r for v in path):
                    separation = False

    domain = FiniteMetric(ks, [[abs(a - b) for b in ks] for a in ks])
    qi_ok = check_qi(QIMap(domain, dict(chain.x), step, 0), g) is True

    # beyond the last chain point a finite chain says nothing, so the window
    # stops at the nearer end
    x0 = chain.x[0]
    effective = min(window_radius, rows[0].get(chain.x[ks[0]], 0), rows[0].get(chain.x[ks[-1]], 0))
    window = distances_from(g, x0, effective)
    cap = window_radius + span
    to_chain = _multi_source(g, list(chain.x.values()), cap)
    path_vertices = set(chain.x.values())
    for m, n in zip(ks, ks[1:]):
        path_vertices.update(shortest_path(g, chain.x[m], chain.x[n], step) or [])
    to_paths = _multi_source(g, sorted(path_vertices), cap)
    gaps = [to_chain[v] for v in window]
    gap_paths = max(to_paths[v] for v in window)
    return ChainAudit(
        r,
        bil_ok,
        first_fail,
        disjoint,
        separation,
        qi_ok,
        window_radius,
        effective,
        max(gaps),
        gap_paths,
        dict(Counter(gaps)),
    )
