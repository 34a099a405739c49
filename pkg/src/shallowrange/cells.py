"""Elementary cells (vertical pseudo-trapezoids) and their x-monotone boundary curves."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import GeometryError
from .geom import DEFAULT_TOL, Circle2, Line2, Point2, Tolerance, line_circle_intersect, circle_circle_intersect


@dataclass(frozen=True)
class Box:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def contains(self, x: float, y: float, eps: float = 0.0) -> bool:
        return (
            self.xmin - eps <= x <= self.xmax + eps
            and self.ymin - eps <= y <= self.ymax + eps
        )

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    def corners(self):
        return [
            Point2(self.xmin, self.ymin),
            Point2(self.xmax, self.ymin),
            Point2(self.xmax, self.ymax),
            Point2(self.xmin, self.ymax),
        ]


#: Default working box; input points are rescaled into [0, 1]^2 and query
#: ranges are clipped to this slightly padded frame.
GLOBAL_BOX = Box(-0.25, -0.25, 1.25, 1.25)


@dataclass(frozen=True)
class SegCurve:
    """Non-vertical segment from (x0, y0) to (x1, y1), x0 < x1."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not self.x1 > self.x0:
            raise GeometryError("segment curve must be x-monotone (x0 < x1)")

    def y_at(self, x):
        t = (np.asarray(x, dtype=np.float64) - self.x0) / (self.x1 - self.x0)
        return self.y0 + t * (self.y1 - self.y0)

    def xspan(self):
        return self.x0, self.x1

    def line(self) -> Line2:
        return Line2.through_points(Point2(self.x0, self.y0), Point2(self.x1, self.y1))

    def to_tuple(self):
        return ("seg", self.x0, self.y0, self.x1, self.y1)


@dataclass(frozen=True)
class ArcCurve:
    """x-monotone circular arc: branch +1 is the upper half, -1 the lower half."""

    cx: float
    cy: float
    r: float
    branch: int
    x0: float
    x1: float

    def __post_init__(self):
        if self.branch not in (-1, 1):
            raise GeometryError("arc branch must be +1 or -1")
        if not self.x1 > self.x0:
            raise GeometryError("arc curve must have positive x extent")

    def y_at(self, x):
        dx = np.asarray(x, dtype=np.float64) - self.cx
        disc = np.maximum(self.r * self.r - dx * dx, 0.0)
        return self.cy + self.branch * np.sqrt(disc)

    def xspan(self):
        return self.x0, self.x1

    def circle(self) -> Circle2:
        return Circle2(Point2(self.cx, self.cy), self.r)

    def to_tuple(self):
        return ("arc", self.cx, self.cy, self.r, float(self.branch), self.x0, self.x1)


Curve = Union[SegCurve, ArcCurve]


def curve_from_tuple(t) -> Curve:
    if t[0] == "seg":
        return SegCurve(*t[1:])
    if t[0] == "arc":
        cx, cy, r, branch, x0, x1 = t[1:]
        return ArcCurve(cx, cy, r, int(branch), x0, x1)
    raise GeometryError(f"unknown curve tag {t[0]!r}")


def _on_arc_branch(arc: ArcCurve, p: Point2, eps: float) -> bool:
    if not (arc.x0 - eps <= p.x <= arc.x1 + eps):
        return False
    if arc.branch == 1:
        return p.y >= arc.cy - eps
    return p.y <= arc.cy + eps


def _on_seg(seg: SegCurve, p: Point2, eps: float) -> bool:
    return seg.x0 - eps <= p.x <= seg.x1 + eps


def curve_intersections(a: Curve, b: Curve, tol: Tolerance = DEFAULT_TOL):
    """Intersection points of two x-monotone curves, restricted to both extents."""
    eps = tol.eps_dist
    pts = []
    if isinstance(a, SegCurve) and isinstance(b, SegCurve):
        # Solve as parametric segments.
        rx, ry = a.x1 - a.x0, a.y1 - a.y0
        sx, sy = b.x1 - b.x0, b.y1 - b.y0
        den = rx * sy - ry * sx
        if abs(den) <= tol.eps_pred:
            return []
        qpx, qpy = b.x0 - a.x0, b.y0 - a.y0
        t = (qpx * sy - qpy * sx) / den
        u = (qpx * ry - qpy * rx) / den
        if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
            pts.append(Point2(a.x0 + t * rx, a.y0 + t * ry))
        return pts
    if isinstance(a, ArcCurve) and isinstance(b, SegCurve):
        a, b = b, a
    if isinstance(a, SegCurve) and isinstance(b, ArcCurve):
        for p in line_circle_intersect(a.line(), b.circle(), tol):
            if _on_seg(a, p, eps) and _on_arc_branch(b, p, eps):
                pts.append(p)
        return pts
    # arc / arc
    ca, cb = a.circle(), b.circle()
    if (
        abs(ca.center.x - cb.center.x) <= tol.eps_pred
        and abs(ca.center.y - cb.center.y) <= tol.eps_pred
        and abs(ca.radius - cb.radius) <= tol.eps_pred
    ):
        return []  # same supporting circle
    for p in circle_circle_intersect(ca, cb, tol):
        if _on_arc_branch(a, p, eps) and _on_arc_branch(b, p, eps):
            pts.append(p)
    return pts


def vertical_intersections(x: float, y0: float, y1: float, c: Curve, tol: Tolerance = DEFAULT_TOL):
    """Intersections of the vertical segment {x} x [y0, y1] with curve c."""
    eps = tol.eps_dist
    xs0, xs1 = c.xspan()
    if not (xs0 - eps <= x <= xs1 + eps):
        return []
    xc = min(max(x, xs0), xs1)
    y = float(c.y_at(xc))
    if y0 - eps <= y <= y1 + eps:
        return [Point2(x, y)]
    return []


@dataclass(frozen=True)
class VSeg:
    """Vertical segment {x} x [y0, y1]; boundary element that is not x-monotone."""

    x: float
    y0: float
    y1: float

    def __post_init__(self):
        if self.y1 < self.y0:
            raise GeometryError("vertical segment needs y0 <= y1")


BoundaryElement = Union[SegCurve, ArcCurve, VSeg]


def element_intersections(a: BoundaryElement, b: BoundaryElement, tol: Tolerance = DEFAULT_TOL):
    """Intersection points of two boundary elements (curves or vertical segments)."""
    if isinstance(a, VSeg) and isinstance(b, VSeg):
        if abs(a.x - b.x) > tol.eps_dist:
            return []
        lo, hi = max(a.y0, b.y0), min(a.y1, b.y1)
        if lo <= hi + tol.eps_dist:
            return [Point2(a.x, 0.5 * (lo + hi))]
        return []
    if isinstance(a, VSeg):
        return vertical_intersections(a.x, a.y0, a.y1, b, tol)
    if isinstance(b, VSeg):
        return vertical_intersections(b.x, b.y0, b.y1, a, tol)
    return curve_intersections(a, b, tol)


def restrict_curve(c: Curve, x0: float, x1: float) -> Curve:
    """Copy of curve c restricted to [x0, x1] (clamped to its own span)."""
    s0, s1 = c.xspan()
    x0, x1 = max(x0, s0), min(x1, s1)
    if isinstance(c, SegCurve):
        return SegCurve(x0, float(c.y_at(x0)), x1, float(c.y_at(x1)))
    return ArcCurve(c.cx, c.cy, c.r, c.branch, x0, x1)


_CELL_FRACTIONS = (0.25, 0.5, 0.75)


@dataclass
class ElementaryCell:
    """Vertical pseudo-trapezoid bounded by two x-monotone curves."""

    x_left: float
    x_right: float
    bottom: Curve
    top: Curve
    id: int = -1
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.x_right > self.x_left:
            raise GeometryError("cell must have positive width")

    def bottom_y(self, x):
        return self.bottom.y_at(x)

    def top_y(self, x):
        return self.top.y_at(x)

    def rep_point(self) -> Point2:
        xm = 0.5 * (self.x_left + self.x_right)
        return Point2(xm, 0.5 * (float(self.bottom_y(xm)) + float(self.top_y(xm))))

    def interior_points(self):
        """3x3 grid of strictly interior sample points (cached)."""
        cached = self._cache.get("interior")
        if cached is None:
            xs = self.x_left + np.array(_CELL_FRACTIONS) * (self.x_right - self.x_left)
            yb = np.asarray(self.bottom_y(xs), dtype=np.float64)
            yt = np.asarray(self.top_y(xs), dtype=np.float64)
            px = np.repeat(xs, len(_CELL_FRACTIONS))
            fr = np.tile(np.array(_CELL_FRACTIONS), len(xs))
            py = np.repeat(yb, len(_CELL_FRACTIONS)) + fr * np.repeat(yt - yb, len(_CELL_FRACTIONS))
            cached = (px, py)
            self._cache["interior"] = cached
        return cached

    def near_boundary_points(self, shrink: float = 1e-6):
        """Interior points hugging the cell boundary (cached)."""
        cached = self._cache.get("near_boundary")
        if cached is None:
            w = self.x_right - self.x_left
            fx = np.array([shrink, 0.25, 0.5, 0.75, 1.0 - shrink])
            xs = self.x_left + fx * w
            yb = np.asarray(self.bottom_y(xs), dtype=np.float64)
            yt = np.asarray(self.top_y(xs), dtype=np.float64)
            h = np.maximum(yt - yb, 0.0)
            off = np.minimum(shrink, 0.25 * h)
            px = np.concatenate([xs, xs])
            py = np.concatenate([yb + off, yt - off])
            keep = np.concatenate([h, h]) > 0
            cached = (px[keep], py[keep])
            self._cache["near_boundary"] = cached
        return cached

    def probe_points(self):
        px1, py1 = self.interior_points()
        px2, py2 = self.near_boundary_points()
        return np.concatenate([px1, px2]), np.concatenate([py1, py2])

    def contains_points(self, xs, ys, eps: float = 0.0):
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        inside_x = (xs >= self.x_left - eps) & (xs <= self.x_right + eps)
        xc = np.clip(xs, self.x_left, self.x_right)
        yb = np.asarray(self.bottom_y(xc), dtype=np.float64)
        yt = np.asarray(self.top_y(xc), dtype=np.float64)
        return inside_x & (ys >= yb - eps) & (ys <= yt + eps)

    def contains_point(self, p: Point2, eps: float = 0.0) -> bool:
        return bool(self.contains_points(np.array([p.x]), np.array([p.y]), eps)[0])

    def bounds(self) -> Box:
        xs = [self.x_left, self.x_right]
        ys = []
        for curve in (self.bottom, self.top):
            ys.append(float(curve.y_at(min(max(self.x_left, curve.xspan()[0]), curve.xspan()[1]))))
            ys.append(float(curve.y_at(min(max(self.x_right, curve.xspan()[0]), curve.xspan()[1]))))
            if isinstance(curve, ArcCurve) and self.x_left < curve.cx < self.x_right:
                ys.append(float(curve.y_at(curve.cx)))
        return Box(min(xs), min(ys), max(xs), max(ys))

    def corners(self):
        xl, xr = self.x_left, self.x_right
        return [
            Point2(xl, float(self.bottom_y(xl))),
            Point2(xr, float(self.bottom_y(xr))),
            Point2(xr, float(self.top_y(xr))),
            Point2(xl, float(self.top_y(xl))),
        ]

    def boundary_elements(self):
        """The four boundary elements: bottom, top, left wall, right wall (cached)."""
        cached = self._cache.get("boundary")
        if cached is None:
            xl, xr = self.x_left, self.x_right
            bl, tl = float(self.bottom_y(xl)), float(self.top_y(xl))
            br, tr = float(self.bottom_y(xr)), float(self.top_y(xr))
            cached = [
                restrict_curve(self.bottom, xl, xr),
                restrict_curve(self.top, xl, xr),
            ]
            if tl > bl:
                cached.append(VSeg(xl, bl, tl))
            if tr > br:
                cached.append(VSeg(xr, br, tr))
            self._cache["boundary"] = cached
        return cached

    def boundary_polyline(self, arc_segments: int = 64):
        """Closed polyline approximation of the cell boundary (for debug dumps)."""
        xs = np.linspace(self.x_left, self.x_right, arc_segments)
        bot = [(float(x), float(self.bottom_y(x))) for x in xs]
        top = [(float(x), float(self.top_y(x))) for x in reversed(xs)]
        return bot + top


def box_cell(box: Box = GLOBAL_BOX, cell_id: int = -1) -> ElementaryCell:
    bottom = SegCurve(box.xmin, box.ymin, box.xmax, box.ymin)
    top = SegCurve(box.xmin, box.ymax, box.xmax, box.ymax)
    return ElementaryCell(box.xmin, box.xmax, bottom, top, cell_id)
