"""Canonical test sets and query-time covering canonization.

Canonical lines pass through two net points, or through one net point with a
grid orientation.  Canonical triangles are built from triples of such lines;
canonical caps pair a canonical chord line with a circle anchored at net
points.  cover_triangle / cover_cap replay the covering constructions that
certify the containment property: every admissible empty (or shallow) query
range is covered by a constant number of canonical ranges.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .cells import Box, GLOBAL_BOX
from .errors import GeometryError, NotNEmptyError
from .geom import (
    DEFAULT_TOL,
    Circle2,
    Line2,
    Point2,
    Tolerance,
    circumcircle,
    orient2d,
)
from .ranges import (
    CircularCap,
    ClippedWedge,
    Disk,
    FatTriangle,
    Range,
    range_from_json,
)

_EPS_ANG = 1e-9


@dataclass(frozen=True)
class OrientationSet:
    """Orientation grid {j*alpha/4 : j = 0..floor(8*pi/alpha)}."""

    alpha: float
    thetas: Tuple[float, ...]

    @classmethod
    def for_alpha(cls, alpha: float) -> "OrientationSet":
        if not (0.0 < alpha <= math.pi):
            raise ValueError("need 0 < alpha <= pi")
        jmax = math.floor(8.0 * math.pi / alpha)
        return cls(alpha, tuple(j * alpha / 4.0 for j in range(jmax + 1)))

    def __len__(self):
        return len(self.thetas)


@dataclass(frozen=True)
class CanonicalLine:
    """Oriented line anchored at net points and/or a grid orientation."""

    line: Line2
    anchor: Tuple  # ("two_points", i, j) with i<j, or ("point_orientation", i, theta_idx)


def canonical_lines(N: Sequence[Point2], D: OrientationSet,
                    tol: Tolerance = DEFAULT_TOL) -> List[CanonicalLine]:
    """All two-point lines plus all point-orientation lines over the net."""
    out: List[CanonicalLine] = []
    seen = set()
    for i in range(len(N)):
        for j in range(i + 1, len(N)):
            if N[i].dist(N[j]) <= tol.eps_dist:
                continue
            ln = Line2.through_points(N[i], N[j])
            key = (round(ln.a, 9), round(ln.b, 9), round(ln.c, 9))
            if key in seen:
                continue
            seen.add(key)
            out.append(CanonicalLine(ln, ("two_points", i, j)))
    for i in range(len(N)):
        for jt, theta in enumerate(D.thetas):
            out.append(CanonicalLine(Line2.through_point_angle(N[i], theta),
                                     ("point_orientation", i, jt)))
    return out


@dataclass
class TestSet:
    __test__ = False  # not a pytest class despite the name

    ranges: List[Range]
    provenance: List[dict]
    net_indices: Optional[np.ndarray]
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.ranges)

    def to_json(self) -> dict:
        return {
            "ranges": [r.to_json() for r in self.ranges],
            "provenance": self.provenance,
            "net_indices": None if self.net_indices is None else [int(i) for i in self.net_indices],
            "params": self.params,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TestSet":
        net = obj.get("net_indices")
        return cls(
            [range_from_json(r) for r in obj["ranges"]],
            obj.get("provenance", []),
            None if net is None else np.asarray(net, dtype=np.int64),
            obj.get("params", {}),
        )

    def dump(self, path: str):
        with open(path, "w") as f:
            json.dump(self.to_json(), f)

    @classmethod
    def load(cls, path: str) -> "TestSet":
        with open(path) as f:
            return cls.from_json(json.load(f))


# ---------------------------------------------------------------------------
# strict membership helpers over the net (floating, small eps)

def _strictly_inside_triangle(vx, vy, px, py, eps: float = 1e-12):
    """vx, vy: (3,) ccw vertices; px, py: arrays."""
    mask = np.ones(np.shape(px), dtype=bool)
    for k in range(3):
        ax, ay = vx[k], vy[k]
        bx, by = vx[(k + 1) % 3], vy[(k + 1) % 3]
        mask &= (bx - ax) * (py - ay) - (by - ay) * (px - ax) > eps
    return mask


def strictly_inside_count(rng_: Range, pts: Sequence[Point2], tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of the given points strictly interior to the range."""
    if not pts:
        return 0
    px = np.array([p.x for p in pts])
    py = np.array([p.y for p in pts])
    if isinstance(rng_, FatTriangle):
        vx = np.array([v.x for v in rng_.vertices])
        vy = np.array([v.y for v in rng_.vertices])
        return int(_strictly_inside_triangle(vx, vy, px, py).sum())
    if isinstance(rng_, Disk):
        c = rng_.circle
        d2 = (px - c.center.x) ** 2 + (py - c.center.y) ** 2
        return int((d2 < (c.radius - tol.eps_dist) ** 2).sum())
    if isinstance(rng_, CircularCap):
        c = rng_.circle
        d2 = (px - c.center.x) ** 2 + (py - c.center.y) ** 2
        m = d2 < (c.radius - tol.eps_dist) ** 2
        m &= rng_.chord.a * px + rng_.chord.b * py - rng_.chord.c > tol.eps_pred
        return int(m.sum())
    if isinstance(rng_, ClippedWedge):
        m = (
            (px > rng_.box.xmin + tol.eps_dist)
            & (px < rng_.box.xmax - tol.eps_dist)
            & (py > rng_.box.ymin + tol.eps_dist)
            & (py < rng_.box.ymax - tol.eps_dist)
        )
        for ln in rng_.lines:
            m &= ln.a * px + ln.b * py - ln.c > tol.eps_pred
        return int(m.sum())
    raise GeometryError(f"unsupported range kind {type(rng_).__name__}")


# ---------------------------------------------------------------------------
# rotation event machinery

def _dir_angle(line: Line2) -> float:
    """Directed angle of the line, in [0, 2*pi)."""
    return math.atan2(-line.a, line.b) % (2.0 * math.pi)


def _first_stop(phi0: float, ccw: bool, d_thetas: Sequence[float],
                point_events: Sequence[Tuple[float, Tuple]]) -> Tuple[float, Tuple]:
    """Earliest rotation stop from phi0 in the given direction.

    point_events: (angle, payload) pairs; each fires at angle and angle+pi.
    Returns (new directed angle, payload); payload ("theta", value) for grid
    stops.
    """
    two_pi = 2.0 * math.pi
    best_delta = None
    best = None
    for theta, payload in point_events:
        for cand in (theta % two_pi, (theta + math.pi) % two_pi):
            delta = (cand - phi0) % two_pi if ccw else (phi0 - cand) % two_pi
            if delta < _EPS_ANG:
                continue
            if best_delta is None or delta < best_delta:
                best_delta, best = delta, (cand, payload)
    for theta in d_thetas:
        cand = theta % two_pi
        delta = (cand - phi0) % two_pi if ccw else (phi0 - cand) % two_pi
        if delta < _EPS_ANG:
            continue
        if best_delta is None or delta < best_delta:
            best_delta, best = delta, (cand, ("theta", theta))
    if best is None:  # phi0 itself is the only orientation (degenerate D)
        return phi0, ("theta", phi0)
    return best


# ---------------------------------------------------------------------------
# triangle covering canonization

def _region_to_range(sides: List[Optional[dict]], box: Box, tol: Tolerance) -> Range:
    lines = [s["line"] for s in sides if s is not None]
    if len(lines) == 3:
        verts = []
        ok = True
        for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
            l1, l2, l3 = lines[i], lines[j], lines[k]
            den = l1.a * l2.b - l1.b * l2.a
            if abs(den) < tol.eps_pred:
                ok = False
                break
            x = (l1.c * l2.b - l1.b * l2.c) / den
            y = (l1.a * l2.c - l1.c * l2.a) / den
            if l3.a * x + l3.b * y - l3.c < tol.eps_pred:
                ok = False
                break
            verts.append(Point2(x, y))
        if ok:
            return FatTriangle(tuple(verts))
    return ClippedWedge(tuple(lines), box)


def cover_triangle(
    tri: FatTriangle,
    N: Sequence[Point2],
    D: OrientationSet,
    mode: str = "emptiness",
    box: Box = GLOBAL_BOX,
    tol: Tolerance = DEFAULT_TOL,
) -> List[Range]:
    """Cover a fat triangle by at most 8 canonical triangles/wedges.

    Expand each side away from its opposite vertex until it hits a net point
    (or drop it when nothing stops the expansion), then rotate each anchored
    side clockwise and counterclockwise about its anchor until the next grid
    orientation or net point.  The union of the outputs contains the input,
    and no net point ever crosses a boundary, so the interior net subset is
    preserved.
    """
    if mode == "emptiness" and strictly_inside_count(tri, N, tol) > 0:
        raise NotNEmptyError("triangle contains net points in its interior")

    v = tri.vertices  # ccw
    sides: List[Optional[dict]] = []
    for k in range(3):
        p, q = v[(k + 1) % 3], v[(k + 2) % 3]
        ln = Line2.through_points(p, q)
        if ln.side(v[k]) < 0:
            ln = ln.flipped()
        sides.append({"line": ln, "anchor_pts": [], "grid": False})

    # expansion phase, sides in index order
    for k in range(3):
        sk = sides[k]
        L = sk["line"]
        best_t, best_i = None, None
        for i, p in enumerate(N):
            sp = L.side(p)
            if sp >= -tol.eps_pred:
                continue
            inside_others = all(
                sides[j] is None or sides[j]["line"].side(p) >= -tol.eps_dist
                for j in range(3) if j != k
            )
            if not inside_others:
                continue
            t = -sp
            if best_t is None or t < best_t - tol.eps_pred:
                best_t, best_i = t, i
        if best_t is None:
            sides[k] = None
        else:
            sides[k] = {
                "line": Line2(L.a, L.b, L.c - best_t),
                "anchor_pts": [best_i],
                "grid": False,
            }

    # rotation phase: split each anchored, not-yet-canonical side two ways
    d_mod = sorted({t % (2.0 * math.pi) for t in D.thetas})

    def is_canonical(s: Optional[dict]) -> bool:
        if s is None:
            return True
        if len(s["anchor_pts"]) >= 2 or s["grid"]:
            return True
        phi = _dir_angle(s["line"])
        return any(abs((phi - t + math.pi) % (2.0 * math.pi) - math.pi) < _EPS_ANG for t in d_mod)

    regions = [sides]
    for k in range(3):
        next_regions = []
        for reg in regions:
            s = reg[k]
            if is_canonical(s):
                next_regions.append(reg)
                continue
            qi = s["anchor_pts"][0]
            q = N[qi]
            phi0 = _dir_angle(s["line"])
            point_events = []
            for i, p in enumerate(N):
                if i == qi or p.dist(q) <= tol.eps_dist:
                    continue
                if all(
                    reg[j] is None or reg[j]["line"].side(p) >= -tol.eps_dist
                    for j in range(3) if j != k
                ):
                    point_events.append((math.atan2(p.y - q.y, p.x - q.x), ("net", i)))
            for ccw in (False, True):
                phi_new, payload = _first_stop(phi0, ccw, d_mod, point_events)
                newline = Line2.through_point_angle(q, phi_new)
                new_side = {
                    "line": newline,
                    "anchor_pts": [qi] + ([payload[1]] if payload[0] == "net" else []),
                    "grid": payload[0] == "theta",
                }
                new_reg = list(reg)
                new_reg[k] = new_side
                next_regions.append(new_reg)
        regions = next_regions

    out = [_region_to_range(reg, box, tol) for reg in regions]
    if len(out) > 8:
        raise GeometryError("covering produced more than 8 ranges")
    return out


# ---------------------------------------------------------------------------
# canonical triangle enumeration

def _triples(L: int, cap: int, rng: np.random.Generator) -> Tuple[np.ndarray, bool]:
    total = L * (L - 1) * (L - 2) // 6
    if total <= cap:
        idx = np.array(list(itertools.combinations(range(L), 3)), dtype=np.int64)
        return idx, False
    picks = rng.integers(0, L, size=(int(cap * 1.3), 3))
    picks.sort(axis=1)
    distinct = (picks[:, 0] < picks[:, 1]) & (picks[:, 1] < picks[:, 2])
    picks = np.unique(picks[distinct], axis=0)
    if len(picks) > cap:
        picks = picks[rng.choice(len(picks), cap, replace=False)]
        picks = picks[np.lexsort((picks[:, 2], picks[:, 1], picks[:, 0]))]
    return picks, True


def _pair_intersections(a, b, c, idx_i, idx_j, eps):
    den = a[idx_i] * b[idx_j] - b[idx_i] * a[idx_j]
    ok = np.abs(den) > eps
    den_safe = np.where(ok, den, 1.0)
    x = (c[idx_i] * b[idx_j] - b[idx_i] * c[idx_j]) / den_safe
    y = (a[idx_i] * c[idx_j] - c[idx_i] * a[idx_j]) / den_safe
    return x, y, ok


def _segment_has_point(ax, ay, bx, by, p: Point2, tol: Tolerance) -> bool:
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 <= tol.eps_pred:
        return p.dist(Point2(ax, ay)) <= tol.eps_dist
    t = ((p.x - ax) * dx + (p.y - ay) * dy) / L2
    return -1e-9 <= t <= 1.0 + 1e-9


def enumerate_canonical_triangles(
    N: Sequence[Point2],
    alpha: float,
    D: Optional[OrientationSet] = None,
    budget: int = 50000,
    seed: int = 0,
    mode: str = "emptiness",
    shallow_limit: int = 0,
    include_unbounded: bool = False,
    triple_cap: int = 2_000_000,
    box: Box = GLOBAL_BOX,
    tol: Tolerance = DEFAULT_TOL,
) -> TestSet:
    """All (alpha/2)-fat, openly net-empty triangles from canonical line triples.

    In reporting mode, "empty" relaxes to at most shallow_limit net points in
    the interior.  Triangles whose anchors fall outside their own edge are
    rejected.  With include_unbounded, box-clipped wedges from line pairs and
    single lines are added (used for closure checks at tiny net sizes).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if D is None:
        D = OrientationSet.for_alpha(alpha)
    params = {"family": "triangle", "alpha": alpha, "budget": budget, "seed": seed,
              "mode": mode, "truncated": False}
    if not N:
        return TestSet([ClippedWedge((), box)], [{"kind": "bbox"}], None, params)

    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF]))
    lines = canonical_lines(N, D, tol)
    L = len(lines)
    a = np.array([cl.line.a for cl in lines])
    b = np.array([cl.line.b for cl in lines])
    c = np.array([cl.line.c for cl in lines])

    idx, truncated = _triples(L, triple_cap, rng)
    i0, i1, i2 = idx[:, 0], idx[:, 1], idx[:, 2]
    x01, y01, ok01 = _pair_intersections(a, b, c, i0, i1, tol.eps_pred)
    x02, y02, ok02 = _pair_intersections(a, b, c, i0, i2, tol.eps_pred)
    x12, y12, ok12 = _pair_intersections(a, b, c, i1, i2, tol.eps_pred)
    valid = ok01 & ok02 & ok12

    # degenerate (nearly coincident vertices) out
    for (xa, ya), (xb, yb) in (((x01, y01), (x02, y02)),
                               ((x01, y01), (x12, y12)),
                               ((x02, y02), (x12, y12))):
        valid &= (xa - xb) ** 2 + (ya - yb) ** 2 > tol.eps_dist ** 2

    # fatness: all three interior angles >= alpha/2
    def _angle(px, py, qx, qy, rx, ry):
        ux, uy = qx - px, qy - py
        wx, wy = rx - px, ry - py
        return np.abs(np.arctan2(ux * wy - uy * wx, ux * wx + uy * wy))

    ang0 = _angle(x01, y01, x02, y02, x12, y12)
    ang1 = _angle(x02, y02, x01, y01, x12, y12)
    ang2 = _angle(x12, y12, x01, y01, x02, y02)
    min_ang = np.minimum(np.minimum(ang0, ang1), ang2)
    valid &= min_ang >= alpha / 2.0 - 1e-9

    # open net-emptiness (or shallowness) via cross products, ccw-normalized
    if valid.any() and len(N) > 0:
        nx = np.array([p.x for p in N])
        ny = np.array([p.y for p in N])
        area = (x02 - x01) * (y12 - y01) - (y02 - y01) * (x12 - x01)
        sgn = np.where(area >= 0, 1.0, -1.0)
        inside = np.ones((len(idx), len(N)), dtype=bool)
        vxs = (x01, x02, x12)
        vys = (y01, y02, y12)
        order = ((0, 1), (1, 2), (2, 0))
        for ka, kb in order:
            axv, ayv = vxs[ka], vys[ka]
            bxv, byv = vxs[kb], vys[kb]
            cross = ((bxv - axv)[:, None] * (ny[None, :] - ayv[:, None])
                     - (byv - ayv)[:, None] * (nx[None, :] - axv[:, None]))
            inside &= sgn[:, None] * cross > 1e-12
        counts = inside.sum(axis=1)
        limit = 0 if mode == "emptiness" else shallow_limit
        valid &= counts <= limit

    survivors = np.flatnonzero(valid)
    ranges: List[Range] = []
    provenance: List[dict] = []
    for s in survivors:
        trio = (int(i0[s]), int(i1[s]), int(i2[s]))
        verts = {
            (0, 1): Point2(float(x01[s]), float(y01[s])),
            (0, 2): Point2(float(x02[s]), float(y02[s])),
            (1, 2): Point2(float(x12[s]), float(y12[s])),
        }
        # anchor points of each line must lie on that line's own closed edge
        edge_of = {0: ((0, 1), (0, 2)), 1: ((0, 1), (1, 2)), 2: ((0, 2), (1, 2))}
        good = True
        for role in range(3):
            cl = lines[trio[role]]
            e1, e2 = edge_of[role]
            va, vb = verts[e1], verts[e2]
            if cl.anchor[0] == "two_points":
                anchor_pts = [N[cl.anchor[1]], N[cl.anchor[2]]]
            else:
                anchor_pts = [N[cl.anchor[1]]]
            for ap in anchor_pts:
                if not _segment_has_point(va.x, va.y, vb.x, vb.y, ap, tol):
                    good = False
                    break
            if not good:
                break
        if not good:
            continue
        try:
            tri = FatTriangle((verts[(0, 1)], verts[(0, 2)], verts[(1, 2)]))
        except GeometryError:
            continue
        ranges.append(tri)
        provenance.append({"kind": "triangle", "lines": [lines[t].anchor for t in trio]})

    if include_unbounded:
        limit = 0 if mode == "emptiness" else shallow_limit
        for li in range(L):
            for sgn_i in (1, -1):
                l1 = lines[li].line if sgn_i == 1 else lines[li].line.flipped()
                w = ClippedWedge((l1,), box)
                if strictly_inside_count(w, N, tol) <= limit:
                    ranges.append(w)
                    provenance.append({"kind": "wedge", "lines": [lines[li].anchor],
                                       "signs": [sgn_i]})
        for li in range(L):
            for lj in range(li + 1, L):
                for sgn_i in (1, -1):
                    for sgn_j in (1, -1):
                        l1 = lines[li].line if sgn_i == 1 else lines[li].line.flipped()
                        l2 = lines[lj].line if sgn_j == 1 else lines[lj].line.flipped()
                        w = ClippedWedge((l1, l2), box)
                        if strictly_inside_count(w, N, tol) <= limit:
                            ranges.append(w)
                            provenance.append({"kind": "wedge",
                                               "lines": [lines[li].anchor, lines[lj].anchor],
                                               "signs": [sgn_i, sgn_j]})

    if len(ranges) > budget:
        keep = np.sort(rng.choice(len(ranges), budget, replace=False))
        ranges = [ranges[i] for i in keep]
        provenance = [provenance[i] for i in keep]
        truncated = True
    params["truncated"] = truncated
    params["num_lines"] = L
    return TestSet(ranges, provenance, None, params)


# ---------------------------------------------------------------------------
# canonical cap enumeration

def _bisector(p: Point2, q: Point2) -> Line2:
    """Perpendicular bisector of pq (normal along q - p)."""
    dx, dy = q.x - p.x, q.y - p.y
    mx, my = 0.5 * (p.x + q.x), 0.5 * (p.y + q.y)
    return Line2(dx, dy, dx * mx + dy * my)


def _beta_circles(p: Point2, q: Point2, ell: Line2, beta: float,
                  tol: Tolerance = DEFAULT_TOL) -> List[Circle2]:
    """Circles through p, q whose chord along ell subtends central angle beta.

    Center c on the bisector of pq; the condition is side(c) = -cos(beta/2) *
    radius(c), a quadratic along the bisector.
    """
    kcos = math.cos(beta / 2.0)
    mx, my = 0.5 * (p.x + q.x), 0.5 * (p.y + q.y)
    dx, dy = q.x - p.x, q.y - p.y
    L = math.hypot(dx, dy)
    if L <= tol.eps_dist:
        return []
    ux, uy = -dy / L, dx / L  # unit direction along the bisector
    h = 0.5 * L
    s_m = ell.a * mx + ell.b * my - ell.c
    s_d = ell.a * ux + ell.b * uy
    # (s_m + t*s_d)^2 = kcos^2 * (h^2 + t^2)
    A = s_d * s_d - kcos * kcos
    B = 2.0 * s_m * s_d
    C = s_m * s_m - kcos * kcos * h * h
    roots: List[float] = []
    if abs(A) < tol.eps_pred:
        if abs(B) > tol.eps_pred:
            roots.append(-C / B)
    else:
        disc = B * B - 4.0 * A * C
        if disc >= 0.0:
            sq = math.sqrt(disc)
            roots.extend([(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)])
    out = []
    for t in roots:
        s = s_m + t * s_d
        rho = math.hypot(h, t)
        if rho <= tol.eps_dist:
            continue
        if abs(s + kcos * rho) > 1e-6 * max(1.0, rho):  # reject squared-equation ghosts
            continue
        out.append(Circle2(Point2(mx + t * ux, my + t * uy), rho))
    return out


def enumerate_canonical_caps(
    N: Sequence[Point2],
    D: OrientationSet,
    beta: float = math.pi,
    budget: int = 50000,
    seed: int = 0,
    mode: str = "emptiness",
    shallow_limit: int = 0,
    min_angle: float = 0.0,
    box: Box = GLOBAL_BOX,
    tol: Tolerance = DEFAULT_TOL,
) -> TestSet:
    """Canonical caps and disks anchored at net points.

    Circle families per chord line: three-point circumcircles, diametric
    two-point circles, two-point circles centered on the chord line, and
    two-point circles at chord central angle exactly beta.  Full disks come
    from the chord-free families.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    params = {"family": "cap", "beta": beta, "budget": budget, "seed": seed,
              "mode": mode, "min_angle": min_angle, "truncated": False}
    if not N:
        return TestSet([ClippedWedge((), box)], [{"kind": "bbox"}], None, params)

    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF]))
    limit = 0 if mode == "emptiness" else shallow_limit

    base_circles: List[Tuple[Circle2, dict]] = []
    for i, j, k in itertools.combinations(range(len(N)), 3):
        if orient2d(N[i], N[j], N[k]) == 0:
            continue
        base_circles.append((circumcircle(N[i], N[j], N[k]),
                             {"circle": "three_points", "ids": [i, j, k]}))
    for i, j in itertools.combinations(range(len(N)), 2):
        d = N[i].dist(N[j])
        if d <= tol.eps_dist:
            continue
        mid = Point2(0.5 * (N[i].x + N[j].x), 0.5 * (N[i].y + N[j].y))
        base_circles.append((Circle2(mid, 0.5 * d),
                             {"circle": "diametric", "ids": [i, j]}))

    ranges: List[Range] = []
    provenance: List[dict] = []

    # full disks
    for circ, prov in base_circles:
        disk = Disk(circ)
        if strictly_inside_count(disk, N, tol) <= limit:
            ranges.append(disk)
            provenance.append({"kind": "disk", **prov})

    chords = canonical_lines(N, D, tol)

    def emit_cap(circ: Circle2, ell: Line2, prov: dict):
        s = ell.side(circ.center)
        if abs(s) >= circ.radius * (1.0 - 1e-9):
            return
        cap = CircularCap(circ, ell)
        if cap.central_angle() < min_angle - 1e-9:
            return
        if strictly_inside_count(cap, N, tol) > limit:
            return
        ranges.append(cap)
        provenance.append({"kind": "cap", **prov})

    for ci, cl in enumerate(chords):
        for flip in (1, -1):
            ell = cl.line if flip == 1 else cl.line.flipped()
            chord_prov = {"chord": cl.anchor, "chord_sign": flip}
            for circ, prov in base_circles:
                emit_cap(circ, ell, {**chord_prov, **prov})
            for i, j in itertools.combinations(range(len(N)), 2):
                if N[i].dist(N[j]) <= tol.eps_dist:
                    continue
                bis = _bisector(N[i], N[j])
                den = bis.a * ell.b - bis.b * ell.a
                if abs(den) > tol.eps_pred:
                    x = (bis.c * ell.b - bis.b * ell.c) / den
                    y = (bis.a * ell.c - bis.c * ell.a) / den
                    center = Point2(x, y)
                    rho = center.dist(N[i])
                    if rho > tol.eps_dist:
                        emit_cap(Circle2(center, rho), ell,
                                 {**chord_prov, "circle": "center_on_chord", "ids": [i, j]})
                for circ in _beta_circles(N[i], N[j], ell, beta, tol):
                    emit_cap(circ, ell,
                             {**chord_prov, "circle": "beta_angle", "ids": [i, j]})

    if len(ranges) > budget:
        keep = np.sort(rng.choice(len(ranges), budget, replace=False))
        ranges = [ranges[i] for i in keep]
        provenance = [provenance[i] for i in keep]
        params["truncated"] = True
    params["num_chords"] = len(chords)
    return TestSet(ranges, provenance, None, params)


# ---------------------------------------------------------------------------
# cap covering canonization

def _halfplane_limit(q: Point2, d: Tuple[float, float]) -> Line2:
    """Limit of a disk pencil through q with center escaping along d."""
    return Line2(d[0], d[1], d[0] * q.x + d[1] * q.y)


def _cap_or_disk(circ: Circle2, ell: Line2) -> Range:
    s = ell.side(circ.center)
    if abs(s) >= circ.radius * (1.0 - 1e-9):
        # chord misses the disk: either the whole disk is in the cap side
        # or the construction degenerated; the disk is the safe cover
        return Disk(circ)
    return CircularCap(circ, ell)


def _pencil_hit(c0: Point2, q1: Point2, d: Tuple[float, float],
                pts: List[Point2], t_max: Optional[float],
                tol: Tolerance) -> Optional[float]:
    """Smallest t > eps with |p - (c0 + t d)| = |q1 - (c0 + t d)| for some p.

    The center moves along d keeping the circle through q1; each candidate
    point gives one linear equation.  t_max bounds the motion when given.
    """
    best = None
    for p in pts:
        den = 2.0 * (d[0] * (p.x - q1.x) + d[1] * (p.y - q1.y))
        if abs(den) <= tol.eps_pred:
            continue
        num = (p.x - c0.x) ** 2 + (p.y - c0.y) ** 2 - (q1.x - c0.x) ** 2 - (q1.y - c0.y) ** 2
        t = num / den
        if t <= tol.eps_dist:
            continue
        if t_max is not None and t > t_max + tol.eps_dist:
            continue
        if best is None or t < best:
            best = t
    return best


def _cover_full_disk(circ: Circle2, N: Sequence[Point2], box: Box,
                     tol: Tolerance) -> List[Range]:
    """Cover a net-empty disk by at most two canonical disks or halfplane limits."""
    if not N:
        return [ClippedWedge((), box)]
    c, rho = circ.center, circ.radius
    outside = [p for p in N if p.dist(c) >= rho - tol.eps_dist]
    if not outside:
        return [ClippedWedge((), box)]
    q1 = min(outside, key=lambda p: (p.dist(c), p.x, p.y))
    rho1 = max(q1.dist(c), rho)
    if q1.dist(c) <= tol.eps_dist:
        return [Disk(Circle2(c, rho1))]
    ux, uy = (c.x - q1.x) / q1.dist(c), (c.y - q1.y) / q1.dist(c)
    cands = [p for p in N if p.dist(q1) > tol.eps_dist]
    t2 = _pencil_hit(c, q1, (ux, uy), cands, None, tol)
    if t2 is None:
        return [ClippedWedge((_halfplane_limit(q1, (ux, uy)),), box)]
    c1 = Point2(c.x + t2 * ux, c.y + t2 * uy)
    q2cands = [p for p in cands if abs(p.dist(c1) - q1.dist(c1)) <= 1e-6]
    q2 = min(q2cands, key=lambda p: (p.x, p.y)) if q2cands else None
    first = Circle2(c1, q1.dist(c1))
    if q2 is None:
        return [Disk(first)]
    # bisector pencil through q1, q2, both directions from c1
    m = Point2(0.5 * (q1.x + q2.x), 0.5 * (q1.y + q2.y))
    dx, dy = q2.x - q1.x, q2.y - q1.y
    L = math.hypot(dx, dy)
    bd = (-dy / L, dx / L)
    rest = [p for p in N if p.dist(q1) > tol.eps_dist and p.dist(q2) > tol.eps_dist]
    out: List[Range] = []
    for sgn in (1.0, -1.0):
        d = (sgn * bd[0], sgn * bd[1])
        stops = []
        tau_m = (m.x - c1.x) * d[0] + (m.y - c1.y) * d[1]
        if tau_m > tol.eps_dist:
            stops.append(tau_m)
        th = _pencil_hit(c1, q1, d, rest, None, tol)
        if th is not None:
            stops.append(th)
        if not stops:
            out.append(ClippedWedge((_halfplane_limit(q1, d),), box))
            continue
        tau = min(stops)
        cc = Point2(c1.x + tau * d[0], c1.y + tau * d[1])
        out.append(Disk(Circle2(cc, q1.dist(cc))))
    return out


def cover_cap(
    C: CircularCap,
    N: Sequence[Point2],
    D: OrientationSet,
    beta: float = math.pi,
    mode: str = "emptiness",
    box: Box = GLOBAL_BOX,
    tol: Tolerance = DEFAULT_TOL,
) -> List[Range]:
    """Cover a circular cap by at most 8 canonical caps/disks/quadrants.

    Stages: translate the chord to a net point (or fall through to the
    full-disk cover), rotate the chord both ways to a grid orientation or a
    second net point, expand the disk to a net anchor, slide the center
    (parallel to the chord or along the chord-endpoint rays), then move the
    center along the anchor bisector to a canonical stop.
    """
    if mode == "emptiness" and strictly_inside_count(C, N, tol) > 0:
        raise NotNEmptyError("cap contains net points in its interior")

    c, rho, ell = C.circle.center, C.circle.radius, C.chord
    s_c = ell.side(c)
    t_exit = rho - s_c
    best_t, q = None, None
    for p in N:
        sp = ell.side(p)
        if sp > tol.eps_pred or p.dist(c) > rho + tol.eps_dist:
            continue
        t = max(-sp, 0.0)
        if t >= t_exit - tol.eps_dist:
            continue
        if best_t is None or t < best_t:
            best_t, q = t, p
    if q is None:
        return _cover_full_disk(C.circle, N, box, tol)
    ell = Line2(ell.a, ell.b, ell.c - best_t)

    # rotate about q, both directions
    d_mod = sorted({t % (2.0 * math.pi) for t in D.thetas})
    phi0 = _dir_angle(ell)
    point_events = []
    for p in N:
        if p.dist(q) <= tol.eps_dist or p.dist(c) > rho + tol.eps_dist:
            continue
        point_events.append((math.atan2(p.y - q.y, p.x - q.x), ("net", p)))
    already = any(abs((phi0 - t + math.pi) % (2.0 * math.pi) - math.pi) < _EPS_ANG for t in d_mod)
    if already:
        chord_lines = [ell]
    else:
        chord_lines = []
        for ccw in (False, True):
            phi_new, _payload = _first_stop(phi0, ccw, d_mod, point_events)
            chord_lines.append(Line2.through_point_angle(q, phi_new))

    out: List[Range] = []
    for ell1 in chord_lines:
        out.extend(_canonize_disk_of_cap(c, rho, ell1, N, beta, box, tol))
    if len(out) > 8:
        raise GeometryError("cap covering produced more than 8 ranges")
    return out


def _canonize_disk_of_cap(c: Point2, rho: float, ell1: Line2, N: Sequence[Point2],
                          beta: float, box: Box, tol: Tolerance) -> List[Range]:
    # expand the disk about c until a net point in the closed cap side stops it
    cands = [p for p in N if ell1.side(p) >= -tol.eps_pred and p.dist(c) >= rho - tol.eps_dist]
    if not cands:
        far = max(math.hypot(cx - c.x, cy - c.y)
                  for cx in (box.xmin, box.xmax) for cy in (box.ymin, box.ymax))
        return [_cap_or_disk(Circle2(c, max(far, rho)), ell1)]
    q1 = min(cands, key=lambda p: (p.dist(c), p.x, p.y))
    rho1 = max(q1.dist(c), rho)

    s1 = ell1.side(c)
    above = [p for p in N if ell1.side(p) >= -tol.eps_pred and p.dist(q1) > tol.eps_dist]
    out: List[Range] = []
    if s1 >= -tol.eps_pred:
        # center in the closed cap side: slide parallel to the chord
        for sgn in (1.0, -1.0):
            d = (sgn * ell1.b, -sgn * ell1.a)
            t = _pencil_hit(c, q1, d, above, None, tol)
            if t is None:
                out.append(ClippedWedge((ell1, _halfplane_limit(q1, d)), box))
                continue
            cc = Point2(c.x + t * d[0], c.y + t * d[1])
            q2 = _closest_on_circle(cc, q1, above, tol)
            out.extend(_bisector_stage(cc, q1, q2, ell1, N, beta, box, tol))
    else:
        # center below the chord: slide along the rays to the chord endpoints
        from .geom import line_circle_intersect
        ends = line_circle_intersect(ell1, Circle2(c, rho1), tol)
        if len(ends) < 2:
            return [_cap_or_disk(Circle2(c, rho1), ell1)]
        for w in ends:
            dw = w.dist(c)
            if dw <= tol.eps_dist:
                continue
            d = ((w.x - c.x) / dw, (w.y - c.y) / dw)
            t = _pencil_hit(c, q1, d, above, dw, tol)
            if t is None:
                # center reaches the chord endpoint: now slide along the chord itself
                out.extend(_slide_on_chord(w, q1, ell1, above, box, tol))
                continue
            cc = Point2(c.x + t * d[0], c.y + t * d[1])
            q2 = _closest_on_circle(cc, q1, above, tol)
            out.extend(_bisector_stage(cc, q1, q2, ell1, N, beta, box, tol))
    return out


def _closest_on_circle(center: Point2, q1: Point2, pts: Sequence[Point2],
                       tol: Tolerance) -> Optional[Point2]:
    r = q1.dist(center)
    hits = [p for p in pts if abs(p.dist(center) - r) <= 1e-6 * max(1.0, r)]
    if not hits:
        return None
    return min(hits, key=lambda p: (p.x, p.y))


def _slide_on_chord(c0: Point2, q1: Point2, ell1: Line2, above: Sequence[Point2],
                    box: Box, tol: Tolerance) -> List[Range]:
    """Center on the chord line: translate it along the line to a second anchor."""
    out: List[Range] = []
    for sgn in (1.0, -1.0):
        d = (sgn * ell1.b, -sgn * ell1.a)
        t = _pencil_hit(c0, q1, d, above, None, tol)
        if t is None:
            out.append(ClippedWedge((ell1, _halfplane_limit(q1, d)), box))
            continue
        cc = Point2(c0.x + t * d[0], c0.y + t * d[1])
        out.append(_cap_or_disk(Circle2(cc, q1.dist(cc)), ell1))
    return out


def _bisector_stage(c0: Point2, q1: Point2, q2: Optional[Point2], ell1: Line2,
                    N: Sequence[Point2], beta: float, box: Box,
                    tol: Tolerance) -> List[Range]:
    """Move the center along the bisector of the two anchors to canonical stops."""
    base = _cap_or_disk(Circle2(c0, max(q1.dist(c0), tol.eps_dist)), ell1)
    if q2 is None or q1.dist(q2) <= tol.eps_dist:
        return [base]
    m = Point2(0.5 * (q1.x + q2.x), 0.5 * (q1.y + q2.y))
    dx, dy = q2.x - q1.x, q2.y - q1.y
    L = math.hypot(dx, dy)
    bd = (-dy / L, dx / L)
    rest = [p for p in N
            if ell1.side(p) >= -tol.eps_pred
            and p.dist(q1) > tol.eps_dist and p.dist(q2) > tol.eps_dist]
    kcos = math.cos(beta / 2.0)
    out: List[Range] = []
    for sgn in (1.0, -1.0):
        d = (sgn * bd[0], sgn * bd[1])
        stops = []
        # (i) center reaches the chord line
        sd = ell1.a * d[0] + ell1.b * d[1]
        s0 = ell1.side(c0)
        if abs(sd) > tol.eps_pred:
            ti = -s0 / sd
            if ti > tol.eps_dist:
                stops.append(ti)
        # (ii) center reaches the midpoint of the anchors
        tm = (m.x - c0.x) * d[0] + (m.y - c0.y) * d[1]
        if tm > tol.eps_dist:
            stops.append(tm)
        # (iii) circle touches a third net point
        th = _pencil_hit(c0, q1, d, rest, None, tol)
        if th is not None:
            stops.append(th)
        # (iv) chord central angle reaches beta: s(t) = -cos(beta/2) * radius(t)
        if abs(kcos) > tol.eps_pred:
            b1 = d[0] * (c0.x - q1.x) + d[1] * (c0.y - q1.y)
            rho0sq = q1.dist(c0) ** 2
            A = sd * sd - kcos * kcos
            B = 2.0 * (s0 * sd - kcos * kcos * b1)
            Cq = s0 * s0 - kcos * kcos * rho0sq
            roots = []
            if abs(A) < tol.eps_pred:
                if abs(B) > tol.eps_pred:
                    roots.append(-Cq / B)
            else:
                disc = B * B - 4.0 * A * Cq
                if disc >= 0.0:
                    sq = math.sqrt(disc)
                    roots.extend([(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)])
            for t in roots:
                if t > tol.eps_dist and (s0 + t * sd) * (-kcos) >= -tol.eps_pred:
                    stops.append(t)
        if not stops:
            out.append(ClippedWedge((ell1, _halfplane_limit(q1, d)), box))
            continue
        tau = min(stops)
        cc = Point2(c0.x + tau * d[0], c0.y + tau * d[1])
        out.append(_cap_or_disk(Circle2(cc, q1.dist(cc)), ell1))
    return out
