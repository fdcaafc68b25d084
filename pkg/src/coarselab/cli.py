"""Command-line front end.

Every subcommand writes a deterministic JSON payload (``--out`` or stdout).
Wall-clock details go to a ``<out>.log`` sidecar so payloads stay byte-identical
across runs and thread counts.

Exit codes: 0 computed and every asserted property held, 1 property violation,
2 usage error, 3 search budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import chain as chain_mod
from . import decorate as dec
from . import invariants as inv
from . import qi_lab
from .generators import parse_graph, parse_shape
from .graph_core import Base, GraphError, VertexId, ball_metric, bfs_ball, distance, parse_vid

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- argument helpers -------------------------------------------------------------


def vid_arg(text: str) -> VertexId:
    text = text.strip()
    if text.startswith(("b:", "s:")):
        return parse_vid(text)
    try:
        return Base(*(int(c) for c in text.split(",")))
    except ValueError:
        raise UsageError(f"cannot parse vertex {text!r}") from None


def number(text: str):
    return Fraction(text) if "/" in text else (int(text) if text.lstrip("-").isdigit() else float(text))


def real_point(text: str) -> float:
    """``12.5``, ``e^4`` or ``exp(4)``."""
    t = text.strip()
    if t.startswith("e^"):
        return math.exp(float(t[2:]))
    if t.startswith("exp(") and t.endswith(")"):
        return math.exp(float(t[4:-1]))
    return float(t)


def parse_pin(text: str, domain) -> tuple:
    """``point:vertex`` where point may be ``center``; tries every split of the colons."""
    parts = text.split(":")
    for i in range(1, len(parts)):
        left, right = ":".join(parts[:i]), ":".join(parts[i:])
        try:
            point = _domain_point(left, domain)
            vertex = vid_arg(right)
        except (UsageError, GraphError):
            continue
        return point, vertex
    raise UsageError(f"cannot parse pin {text!r}; expected <point>:<vertex>")


def _domain_point(text: str, domain):
    if text == "center":
        dim = len(domain.points[0].data)
        point = Base(*([0] * dim))
    else:
        point = vid_arg(text)
    if point not in domain.index:
        raise UsageError(f"{text!r} is not a point of the domain")
    return point


def domain_arg(spec: str):
    """``interval:n``, ``tripod:n`` or ``ball:<graph>@<vertex>/<R>``."""
    if spec.startswith("ball:"):
        body, _, radius = spec[5:].rpartition("/")
        graph, _, center = body.rpartition("@")
        if not (graph and center and radius.isdigit()):
            raise UsageError(f"cannot parse ball domain {spec!r}")
        g = graph_arg(graph)
        return ball_metric(g, vid_arg(center), int(radius))
    try:
        return parse_shape(spec)
    except (GraphError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def graph_arg(spec: str):
    try:
        return parse_graph(spec)
    except (GraphError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _decorated(args):
    g = graph_arg(args.graph)
    if isinstance(g, dec.DecoratedOracle):
        return g
    if args.alpha is None:
        raise UsageError("give a decorate:<base>:alpha=<a> spec or --alpha")
    return dec.decorate(g, g.labeling, args.alpha)


# -- output --------------------------------------------------------------------------


def dump(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def emit(args, payload) -> None:
    text = dump(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def write_table(path: str, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_gnuplot(path: str, title: str, header: list, rows: list, logscale: bool = False) -> None:
    """Self-contained gnuplot script with the table inlined as a data block."""
    buf = io.StringIO()
    buf.write(f"# {title}\n$data << EOD\n")
    buf.write("# " + " ".join(header) + "\n")
    for row in rows:
        buf.write(" ".join(str(c) for c in row) + "\n")
    buf.write("EOD\n")
    buf.write(f'set title "{title}"\nset key left top\nset xlabel "{header[0]}"\n')
    if logscale:
        buf.write("set logscale y\n")
    plots = ", ".join(
        f'$data using 1:{i + 1} with linespoints title "{name}"' for i, name in enumerate(header[1:], 1)
    )
    buf.write(f"plot {plots}\n")
    Path(path).write_text(buf.getvalue())


def tables(args, title, header, rows, logscale=False):
    if getattr(args, "csv", None):
        write_table(args.csv, header, rows)
    if getattr(args, "gnuplot", None):
        write_gnuplot(args.gnuplot, title, header, rows, logscale)


# -- subcommands ------------------------------------------------------------------------


def cmd_growth(args):
    g = graph_arg(args.graph)
    x0 = vid_arg(args.x0) if args.x0 else g.basepoint
    series = inv.growth_series(g, x0, args.n)
    ok = all(b >= a + 1 for a, b in zip(series.values, series.values[1:]))
    emit(args, {
        "command": "growth",
        "graph": g.name,
        "basepoint": str(x0),
        "series": series.values,
        "spheres": series.spheres,
        "strictly_increasing": ok,
    })
    rows = [[n, b, s] for n, (b, s) in enumerate(zip(series.values, series.spheres))]
    tables(args, f"growth of {g.name}", ["n", "ball", "sphere"], rows, logscale=True)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_ends(args):
    g = graph_arg(args.graph)
    x0 = vid_arg(args.x0) if args.x0 else g.basepoint
    radii = sorted({int(r) for r in args.r.split(",")})
    prof = inv.ends_profile(g, x0, radii, args.R_max, args.window, args.threads)
    emit(args, {
        "command": "ends",
        "graph": g.name,
        "basepoint": str(x0),
        "window": prof.window,
        "ends": prof.to_json(),
        "stabilized": {
            str(r): (None if s is None else {"count": s[0], "R_window": list(s[1])})
            for r, s in prof.stabilized.items()
        },
    })
    if args.csv:
        write_table(args.csv, ["r", "R", "count"], prof.rows)
    if args.gnuplot:
        Rs = sorted({R for _, R, _ in prof.rows})
        by = {(r, R): c for r, R, c in prof.rows}
        wide = [[R] + [by.get((r, R), "NaN") for r in radii] for R in Rs]
        write_gnuplot(args.gnuplot, f"ends profile of {g.name}", ["R"] + [f"r={r}" for r in radii], wide)
    return EXIT_OK


def cmd_decorate_info(args):
    rows = []
    for m in range(1, args.m_max + 1):
        rows.append([m, dec.g_alpha(args.alpha, m), dec.tip_distance(args.alpha, m), (m + 1) ** 2])
    ok = all(g <= m and tip < nxt for m, g, tip, nxt in rows)
    emit(args, {
        "command": "decorate-info",
        "alpha": args.alpha,
        "log_base": "e",
        "table": [{"m": m, "g_alpha": g, "tip_distance": t, "next_root": nx} for m, g, t, nx in rows],
        "milestones_ordered": ok,
    })
    tables(args, f"g_alpha, alpha={args.alpha}", ["m", "g_alpha", "tip_distance", "next_root"], rows)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_sandwich(args):
    base = graph_arg(args.base)
    decorated = dec.decorate(base, base.labeling, args.alpha)
    rep = inv.check_growth_sandwich(base, decorated, args.n)
    emit(args, {
        "command": "sandwich",
        "graph": decorated.name,
        "basepoint": str(decorated.basepoint),
        "series": {"base": rep.base_balls, "decorated": rep.decorated_balls},
        "sandwich": rep.to_json(),
        "sphere_one_equal": rep.sphere_one_equal,
    })
    rows = [
        [n, rep.base_balls[n], rep.decorated_balls[n], 2 * rep.base_balls[n]]
        for n in range(args.n + 1)
    ]
    tables(args, f"growth sandwich {decorated.name}", ["n", "base", "decorated", "twice_base"], rows)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_qisearch(args):
    domain = domain_arg(args.domain)
    codomain = graph_arg(args.codomain)
    pins = [parse_pin(p, domain) for p in args.pin]
    if not pins:
        raise UsageError("at least one --pin is required")
    window = None
    if args.window:
        c, _, rad = args.window.rpartition("/")
        window = (vid_arg(c), int(rad))
    out = qi_lab.search_embedding(
        domain, codomain, window, number(args.L), number(args.A), pins, args.budget, args.threads
    )
    payload = {
        "command": "qisearch",
        "domain": args.domain,
        "codomain": codomain.name,
        "pins": [[str(p), str(v)] for p, v in pins],
        "certificate": out.to_json(),
    }
    if isinstance(codomain, dec.DecoratedOracle) and isinstance(out, qi_lab.Found):
        payload["base_proximity"] = qi_lab.base_proximity_audit(out.map, out.map.L, out.map.A, codomain).to_json()
    emit(args, payload)
    return EXIT_OK


def cmd_census(args):
    c = qi_lab.endpoint_order_census(args.n, number(args.L), number(args.A), args.budget)
    L, A = c.L, c.A
    applies = args.n > L * L + 2 * L * A
    payload = {"command": "census", **c.to_json(), "order_forced": applies}
    emit(args, payload)
    return EXIT_VIOLATION if applies and c.order_violations else EXIT_OK


def cmd_refute_ct(args):
    g = graph_arg(args.graph)
    out = qi_lab.refute_coarse_transitivity(
        g, vid_arg(args.x), vid_arg(args.y), number(args.K), args.R, args.budget, args.threads
    )
    emit(args, {"command": "refute-ct", "graph": g.name, "result": out.to_json()})
    if isinstance(out, qi_lab.Inconclusive) and out.found is None:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_chain(args):
    g = graph_arg(args.graph)
    x0 = vid_arg(args.x0) if args.x0 else g.basepoint
    ch = chain_mod.build_chain(g, x0, args.r, (args.k_min, args.k_max))
    audit = chain_mod.audit_chain(ch, g, args.window)
    emit(args, {
        "command": "chain",
        "graph": g.name,
        "r": ch.r,
        "step": ch.step,
        "working_horizon": ch.horizon,
        "chain": ch.to_json(),
        "sides": {str(k): v for k, v in ch.side_labels.items()},
        "audit": audit.to_json(),
    })
    return EXIT_OK if audit.passed else EXIT_VIOLATION


def cmd_threshold(args):
    L, A, M, D = (number(v) for v in (args.L, args.A, args.M, args.D))
    try:
        N = dec.find_threshold_N(args.alpha, args.beta, L, A, M, D, args.check_factor, args.ceiling)
    except dec.ThresholdNotFound as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET
    rows = []
    for x in (N - 1, N, args.check_factor * N):
        if x >= 1:
            lhs, rhs, holds = dec.threshold_inequality(args.alpha, args.beta, L, A, M, D, x)
            rows.append({"x": x, "g_beta": lhs, "rhs": str(rhs), "holds": holds})
    record = {
        "command": "threshold",
        "alpha": args.alpha,
        "beta": args.beta,
        "L": str(L), "A": str(A), "M": str(M), "D": str(D),
        "N": N,
        "certified_window": [N, args.check_factor * N],
        "samples": rows,
    }
    sys.stdout.write(f"{N}\n")
    text = dump(record)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stderr.write(text)
    return EXIT_OK


def cmd_ratio(args):
    a, b = (number(v) for v in args.T.split(","))
    p = [number(v) for v in args.p.split(",")]
    xs = [real_point(t) for t in args.xs.split(",")]
    vals = dec.ratio_series(args.alpha, args.beta, (a, b), p, xs)
    decreasing = all(u > v for u, v in zip(vals, vals[1:]))
    emit(args, {
        "command": "ratio",
        "alpha": args.alpha,
        "beta": args.beta,
        "xs": args.xs.split(","),
        "values": vals,
        "strictly_decreasing": decreasing,
    })
    return EXIT_OK


def cmd_embed_tree(args):
    decorated = _decorated(args)
    emb = inv.embed_Y_in_tree(decorated, args.radius, strict=False)
    emit(args, {
        "command": "embed-tree",
        "graph": decorated.name,
        "radius": args.radius,
        "vertices": len(emb.mapping),
        "pairs_checked": emb.pairs_checked,
        "violations": [[str(u), str(v), dy, dt] for u, v, dy, dt in emb.violations],
        "map": [[str(u), str(t)] for u, t in sorted(emb.mapping.items())],
    })
    return EXIT_OK if emb.passed else EXIT_VIOLATION


def cmd_cubicalize_audit(args):
    g = graph_arg(args.graph)
    cub = dec.cubicalize(g)
    ball = [v for v, _ in bfs_ball(g, g.basepoint, args.radius).vertices]
    rng = random.Random(args.seed)
    pairs = [(rng.choice(ball), rng.choice(ball)) for _ in range(args.pairs)]
    D = g.degree_bound
    rows = []
    ok = True
    max_deg = 0
    for u, v in pairs:
        d = distance(g, u, v, 2 * args.radius)
        dc = distance(cub, cub.representative(u), cub.representative(v), D * 2 * args.radius + D)
        fine = isinstance(d, int) and isinstance(dc, int) and d <= dc <= D * d + D
        ok &= fine
        rows.append([str(u), str(v), d, dc if isinstance(dc, int) else None, fine])
    for v, _ in bfs_ball(cub, cub.basepoint, args.radius).vertices:
        max_deg = max(max_deg, len(cub.neighbors(v)))
    ok &= max_deg <= 3
    emit(args, {
        "command": "cubicalize-audit",
        "graph": g.name,
        "seed": args.seed,
        "degree_bound": D,
        "max_degree": max_deg,
        "pairs": rows,
        "pass": ok,
    })
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_export_snapshot(args):
    g = graph_arg(args.graph)
    x0 = vid_arg(args.x0) if args.x0 else g.basepoint
    text = bfs_ball(g, x0, args.radius).to_edge_list()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coarselab", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, helptext):
        p = sub.add_parser(name, help=helptext)
        p.set_defaults(func=func)
        p.add_argument("--out")
        p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
        return p

    p = add("growth", cmd_growth, "ball sizes |B(x0,n)|")
    p.add_argument("graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x0")
    p.add_argument("--csv")
    p.add_argument("--gnuplot")

    p = add("ends", cmd_ends, "horizon-component profile")
    p.add_argument("graph")
    p.add_argument("--r", default="1,2,3")
    p.add_argument("--R-max", dest="R_max", type=int, required=True)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--x0")
    p.add_argument("--csv")
    p.add_argument("--gnuplot")

    p = add("decorate-info", cmd_decorate_info, "g_alpha table and tip distances")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m-max", dest="m_max", type=int, default=12)
    p.add_argument("--csv")
    p.add_argument("--gnuplot")

    p = add("sandwich", cmd_sandwich, "growth sandwich for X and X_alpha")
    p.add_argument("--base", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv")
    p.add_argument("--gnuplot")

    p = add("qisearch", cmd_qisearch, "pinned (L,A)-QI embedding search")
    p.add_argument("--domain", required=True, help="interval:n, tripod:n or ball:<graph>@<vertex>/<R>")
    p.add_argument("--codomain", required=True)
    p.add_argument("--L", required=True)
    p.add_argument("--A", required=True)
    p.add_argument("--pin", action="append", default=[], help="<point>:<vertex>, e.g. center:0")
    p.add_argument("--window", help="<vertex>/<radius>")
    p.add_argument("--budget", type=int)

    p = add("census", cmd_census, "endpoint-order census of Interval(n) -> Z")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", required=True)
    p.add_argument("--A", required=True)
    p.add_argument("--budget", type=int)

    p = add("refute-ct", cmd_refute_ct, "local refutation of coarse transitivity")
    p.add_argument("graph")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--K", required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--budget", type=int)

    p = add("chain", cmd_chain, "ball chain and its audit")
    p.add_argument("graph")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--k-min", dest="k_min", type=int, default=-8)
    p.add_argument("--k-max", dest="k_max", type=int, default=8)
    p.add_argument("--window", type=int, default=20)
    p.add_argument("--x0")

    p = add("threshold", cmd_threshold, "threshold N for the distinct-alpha inequality")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--L", default="1")
    p.add_argument("--A", default="0")
    p.add_argument("--M", default="0")
    p.add_argument("--D", default="0")
    p.add_argument("--check-factor", dest="check_factor", type=int, default=10)
    p.add_argument("--ceiling", type=int, default=10**7)

    p = add("ratio", cmd_ratio, "T(g_alpha(p(x))) / g_beta(x) series")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--T", default="1,0", help="a,b for T(y) = a y + b")
    p.add_argument("--p", default="0,1", help="ascending coefficients")
    p.add_argument("--xs", required=True, help="comma list; e^k allowed")

    p = add("embed-tree", cmd_embed_tree, "isometric embedding of Y into the 3-regular tree")
    p.add_argument("graph")
    p.add_argument("--alpha", type=float)
    p.add_argument("--radius", type=int, default=25)

    p = add("cubicalize-audit", cmd_cubicalize_audit, "distortion of the degree-3 reduction")
    p.add_argument("graph")
    p.add_argument("--pairs", type=int, default=50)
    p.add_argument("--radius", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)

    p = add("export-snapshot", cmd_export_snapshot, "edge list of a ball")
    p.add_argument("graph")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--x0")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    started = time.time()
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except qi_lab.BudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET
    except (chain_mod.ChainError, dec.GeodesicAuditError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VIOLATION
    except (GraphError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = getattr(args, "out", None)
    if out:
        log = {
            "argv": list(sys.argv[1:] if argv is None else argv),
            "threads": args.threads,
            "exit_code": code,
            "started": time.strftime("%Y-%m-%dT%H:%M:%S", time.localtime(started)),
            "elapsed_s": round(time.time() - started, 3),
        }
        Path(out + ".log").write_text(dump(log))
    return code


if __name__ == "__main__":
    sys.exit(main())
