"""Command-line surface: generate, build, query, verify, bench, approx."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np

from . import __version__
from .approx import ApproxCounter, ApproxParams
from .errors import FamilyMismatchError, MalformedInputError
from .gen import random_cap, random_fat_triangle, random_points
from .geom import DEFAULT_TOL, Circle2, Line2, Point2, Tolerance
from .oracle import brute_count, brute_nearest_above, brute_report
from .partition import PartitionTree, build_tree, load_tree, save_tree
from .points import PointSet
from .query import nearest_above_line, query_report
from .ranges import FAMILY_CAP, FAMILY_TRIANGLE, CircularCap, FatTriangle, Range


@dataclass
class RunConfig:
    seed: int = 0
    r: int = 8
    alpha_deg: float = 30.0
    beta_deg: float = 180.0
    leaf_size: int = 128
    budget: int = 50000
    engine: str = "tree"
    eps_pred: Optional[float] = None
    eps_dist: Optional[float] = None

    def tolerance(self) -> Tolerance:
        t = DEFAULT_TOL
        return Tolerance(self.eps_pred if self.eps_pred is not None else t.eps_pred,
                         self.eps_dist if self.eps_dist is not None else t.eps_dist)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        cfg = cls()
        for f in ("seed", "r", "alpha_deg", "beta_deg", "leaf_size",
                  "budget", "engine", "eps_pred", "eps_dist"):
            v = getattr(args, f, None)
            if v is not None:
                setattr(cfg, f, v)
        return cfg


def _header(config: RunConfig) -> dict:
    return {"header": {"artifact_version": __version__, "config": asdict(config)}}


# ---------------------------------------------------------------------------
# file formats


def load_points(path: str) -> PointSet:
    """CSV 'x,y' lines (comment lines start with '#') or a JSON array of pairs."""
    with open(path) as f:
        text = f.read()
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            arr = json.loads(text)
            xs = [float(p[0]) for p in arr]
            ys = [float(p[1]) for p in arr]
        except (ValueError, TypeError, IndexError) as e:
            raise MalformedInputError(f"bad JSON points file: {e}") from e
        return PointSet(np.asarray(xs), np.asarray(ys))
    xs, ys = [], []
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise MalformedInputError("expected 'x,y'", line=ln)
        try:
            xs.append(float(parts[0]))
            ys.append(float(parts[1]))
        except ValueError:
            raise MalformedInputError(f"bad number in {line!r}", line=ln) from None
    return PointSet(np.asarray(xs), np.asarray(ys))


def parse_query(obj: dict, ln: int):
    """One query object -> ('range'|'nearest'|'approx', payload)."""
    try:
        qtype = obj["type"]
        if qtype == "fat_triangle":
            v = obj["vertices"]
            return "range", FatTriangle(tuple(Point2(float(p[0]), float(p[1])) for p in v))
        if qtype == "cap":
            cx, cy = obj["center"]
            a, b, c = obj["chord"]
            return "range", CircularCap(Circle2(Point2(float(cx), float(cy)),
                                                float(obj["radius"])),
                                        Line2(float(a), float(b), float(c)))
        if qtype == "nearest_above":
            qx, qy = obj["q"]
            a, b, c = obj["line"]
            return "nearest", (Point2(float(qx), float(qy)),
                               Line2(float(a), float(b), float(c)))
        if qtype == "approx_count":
            sub = dict(obj)
            sub["type"] = "fat_triangle" if "vertices" in obj else "cap"
            _, rng_ = parse_query(sub, ln)
            return "approx", (rng_, float(obj.get("delta", 0.25)))
    except (KeyError, ValueError, TypeError) as e:
        raise MalformedInputError(f"bad query: {e}", line=ln) from e
    raise MalformedInputError(f"unknown query type {obj.get('type')!r}", line=ln)


def load_queries(path: str) -> List[tuple]:
    out = []
    with open(path) as f:
        for ln, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedInputError(f"bad JSON: {e}", line=ln) from e
            out.append((obj, parse_query(obj, ln)))
    return out


# ---------------------------------------------------------------------------
# engines


def _family_of(rng_: Range) -> str:
    return rng_.family


def _answer(obj: dict, kind, payload, tree: Optional[PartitionTree],
            P: PointSet, engine: str, counter: Optional[ApproxCounter],
            config: RunConfig, tol: Tolerance) -> dict:
    rec = dict(obj)
    if kind == "range":
        if engine == "tree":
            if tree is None or _family_of(payload) != tree.family:
                raise FamilyMismatchError(
                    f"query family {_family_of(payload)!r} does not match index"
                )
            idx, st = query_report(tree, payload, tol=tol)
            rec["result"] = [int(i) for i in idx]
            rec["stats"] = {"nodes_visited": st.nodes_visited,
                            "leaves_scanned": st.leaves_scanned,
                            "fallbacks": st.fallbacks,
                            "points_tested": st.points_tested}
        else:
            idx = brute_report(P, payload, tol)
            rec["result"] = [int(i) for i in idx]
            rec["stats"] = {"engine": "naive", "points_tested": len(P)}
    elif kind == "nearest":
        q, line = payload
        if engine == "tree" and tree is not None and tree.family == FAMILY_CAP:
            got, st = nearest_above_line(tree, q, line, tol=tol)
            rec["stats"] = {"nodes_visited": st.nodes_visited,
                            "fallbacks": st.fallbacks}
        else:
            got = brute_nearest_above(P, q, line, tol)
            rec["stats"] = {"engine": "naive"}
        rec["result"] = None if got is None else {"index": got[0], "distance": got[1]}
    elif kind == "approx":
        rng_, delta = payload
        if counter is None or counter.params.delta != delta:
            counter = ApproxCounter(P, ApproxParams(delta=delta), seed=config.seed)
        t, st = counter.count(rng_, tol)
        rec["result"] = t
        rec["stats"] = st
    return rec


def _run_queries(queries, tree, P, engine, config, tol, out_file):
    out_file.write(json.dumps(_header(config), sort_keys=True) + "\n")
    counter = None
    for obj, (kind, payload) in queries:
        try:
            rec = _answer(obj, kind, payload, tree, P, engine, counter, config, tol)
        except FamilyMismatchError as e:
            rec = dict(obj)
            rec["error"] = str(e)
        out_file.write(json.dumps(rec, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    config = RunConfig.from_args(args)
    P = random_points(args.n, args.distribution, seed=config.seed)
    with open(args.out, "w") as f:
        f.write("# " + json.dumps(_header(config), sort_keys=True) + "\n")
        for x, y in zip(P.xs, P.ys):
            f.write(f"{float(x)!r},{float(y)!r}\n")
    return 0


def _build_from_config(P: PointSet, family: str, config: RunConfig) -> PartitionTree:
    angle = math.radians(config.alpha_deg) if family == FAMILY_TRIANGLE \
        else math.radians(config.beta_deg)
    return build_tree(P, family, angle, r=float(config.r),
                      leaf_size=config.leaf_size, seed=config.seed,
                      budget=config.budget, tol=config.tolerance())


def cmd_build(args) -> int:
    config = RunConfig.from_args(args)
    P = load_points(args.points)
    tree = _build_from_config(P, args.family, config)
    save_tree(tree, args.out, mode=args.mode)
    return 0


def cmd_query(args) -> int:
    config = RunConfig.from_args(args)
    tol = config.tolerance()
    tree = None
    if args.index:
        tree = load_tree(args.index)
        P = tree.P
        # the embedded config must describe the structure actually queried
        config.r = int(tree.r)
        config.leaf_size = tree.leaf_size
        config.seed = tree.seed
        if tree.family == FAMILY_TRIANGLE:
            config.alpha_deg = math.degrees(tree.angle)
        else:
            config.beta_deg = math.degrees(tree.angle)
    else:
        P = load_points(args.points)
        if config.engine == "tree":
            fam = FAMILY_TRIANGLE if args.family == FAMILY_TRIANGLE else FAMILY_CAP
            tree = _build_from_config(P, fam, config)
    queries = load_queries(args.queries)
    with open(args.out, "w") as f:
        _run_queries(queries, tree, P, config.engine, config, tol, f)
    return 0


def cmd_verify(args) -> int:
    config = RunConfig.from_args(args)
    tol = config.tolerance()
    P = load_points(args.points)
    queries = load_queries(args.queries)
    families = {FAMILY_TRIANGLE: None, FAMILY_CAP: None}
    mismatches = 0
    checked = 0
    for obj, (kind, payload) in queries:
        if kind == "range":
            fam = _family_of(payload)
            if families[fam] is None:
                families[fam] = _build_from_config(P, fam, config)
            got, _ = query_report(families[fam], payload, tol=tol)
            want = brute_report(P, payload, tol)
            checked += 1
            if not np.array_equal(got, want):
                mismatches += 1
                print(f"MISMATCH {obj}", file=sys.stderr)
        elif kind == "nearest":
            if families[FAMILY_CAP] is None:
                families[FAMILY_CAP] = _build_from_config(P, FAMILY_CAP, config)
            q, line = payload
            got, _ = nearest_above_line(families[FAMILY_CAP], q, line, tol=tol)
            want = brute_nearest_above(P, q, line, tol)
            checked += 1
            bad = (got is None) != (want is None)
            if not bad and got is not None:
                bad = abs(got[1] - want[1]) > 1e-9
            if bad:
                mismatches += 1
                print(f"MISMATCH {obj}", file=sys.stderr)
        else:
            rng_, delta = payload
            counter = ApproxCounter(P, ApproxParams(delta=delta), seed=config.seed)
            t, _ = counter.count(rng_, tol)
            m = brute_count(P, rng_, tol)
            checked += 1
            if (m == 0) != (t == 0):
                mismatches += 1
                print(f"MISMATCH {obj}", file=sys.stderr)
    print(f"verified {checked} queries, {mismatches} mismatches")
    return 1 if mismatches else 0


def cmd_bench(args) -> int:
    config = RunConfig.from_args(args)
    tol = config.tolerance()
    sizes = [int(s) for s in args.sizes.split(",")]
    fams = args.families.split(",")
    rows = []
    for n in sizes:
        P = random_points(n, "uniform", seed=config.seed)
        for fam in fams:
            t0 = time.perf_counter()
            tree = _build_from_config(P, fam, config)
            build_s = time.perf_counter() - t0
            rng = np.random.default_rng(np.random.SeedSequence(
                [config.seed & 0xFFFFFFFF, n]))
            lat, nodes = [], []
            kmax = 0
            for _ in range(args.queries):
                if fam == FAMILY_TRIANGLE:
                    g = random_fat_triangle(rng, math.radians(config.alpha_deg))
                else:
                    g = random_cap(rng, math.radians(config.beta_deg))
                t1 = time.perf_counter()
                _, st = query_report(tree, g, tol=tol)
                lat.append(time.perf_counter() - t1)
                nodes.append(st.nodes_visited)
            for nd in _walk(tree.root):
                kmax = max(kmax, int(nd.stats.get("max_crossing", 0)))
            lat = np.array(lat)
            rows.append({
                "n": n, "family": fam, "build_s": round(build_s, 4),
                "query_p50_ms": round(float(np.percentile(lat, 50)) * 1e3, 4),
                "query_p90_ms": round(float(np.percentile(lat, 90)) * 1e3, 4),
                "nodes_visited_median": float(np.median(nodes)),
                "max_crossing": kmax, "nodes": tree.count_nodes(),
            })
    with open(args.out, "w", newline="") as f:
        f.write("# " + json.dumps(_header(config), sort_keys=True) + "\n")
        w = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        w.writeheader()
        w.writerows(rows)
    return 0


def _walk(node):
    yield node
    for ch in node.children:
        yield from _walk(ch)


def cmd_approx(args) -> int:
    config = RunConfig.from_args(args)
    tol = config.tolerance()
    P = load_points(args.points)
    counter = ApproxCounter(P, ApproxParams(delta=args.delta), seed=config.seed)
    queries = load_queries(args.queries)
    with open(args.out, "w") as f:
        f.write(json.dumps(_header(config), sort_keys=True) + "\n")
        for obj, (kind, payload) in queries:
            rec = dict(obj)
            rng_ = payload if kind == "range" else payload[0]
            if kind == "nearest":
                rec["error"] = "nearest_above is not a counting query"
            else:
                t, st = counter.count(rng_, tol)
                rec["result"] = t
                rec["stats"] = st
            f.write(json.dumps(rec, sort_keys=True) + "\n")
    return 0


# ---------------------------------------------------------------------------


def _add_config_flags(p, seed_required=False):
    p.add_argument("--seed", type=int, required=seed_required,
                   default=None if seed_required else 0)
    p.add_argument("--r", type=int, default=8)
    p.add_argument("--alpha-deg", dest="alpha_deg", type=float, default=30.0)
    p.add_argument("--beta-deg", dest="beta_deg", type=float, default=180.0)
    p.add_argument("--leaf-size", dest="leaf_size", type=int, default=128)
    p.add_argument("--budget", type=int, default=50000)
    p.add_argument("--engine", choices=["tree", "naive"], default="tree")
    p.add_argument("--eps-pred", dest="eps_pred", type=float, default=None)
    p.add_argument("--eps-dist", dest="eps_dist", type=float, default=None)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="shallowrange")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random point file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--distribution", choices=["uniform", "gaussian", "clustered"],
                   default="uniform")
    g.add_argument("--out", required=True)
    _add_config_flags(g)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("build", help="build and serialize a partition tree")
    b.add_argument("--points", required=True)
    b.add_argument("--family", choices=[FAMILY_TRIANGLE, FAMILY_CAP], required=True)
    b.add_argument("--mode", choices=["emptiness", "reporting"], default="reporting")
    b.add_argument("--out", required=True)
    _add_config_flags(b)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="run a JSONL query file")
    q.add_argument("--index", default=None)
    q.add_argument("--points", default=None)
    q.add_argument("--family", choices=[FAMILY_TRIANGLE, FAMILY_CAP],
                   default=FAMILY_TRIANGLE)
    q.add_argument("--queries", required=True)
    q.add_argument("--out", required=True)
    _add_config_flags(q)
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("verify", help="compare tree answers against brute force")
    v.add_argument("--points", required=True)
    v.add_argument("--queries", required=True)
    _add_config_flags(v, seed_required=True)
    v.set_defaults(func=cmd_verify)

    be = sub.add_parser("bench", help="benchmark builds and queries to CSV")
    be.add_argument("--sizes", default="1024,2048")
    be.add_argument("--families", default=f"{FAMILY_TRIANGLE},{FAMILY_CAP}")
    be.add_argument("--queries", type=int, default=100)
    be.add_argument("--out", required=True)
    _add_config_flags(be, seed_required=True)
    be.set_defaults(func=cmd_bench)

    apx = sub.add_parser("approx", help="approximate counting over a query file")
    apx.add_argument("--points", required=True)
    apx.add_argument("--queries", required=True)
    apx.add_argument("--delta", type=float, default=0.25)
    apx.add_argument("--out", required=True)
    _add_config_flags(apx)
    apx.set_defaults(func=cmd_approx)

    args = ap.parse_args(argv)
    if args.command == "query" and not (args.index or args.points):
        ap.error("query needs --index or --points")
    try:
        return args.func(args)
    except MalformedInputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
