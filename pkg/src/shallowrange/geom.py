"""Planar primitives: points, oriented lines, circles, and exact-leaning predicates.

Line-side predicates are exact for representable doubles (floating filter with
an exact rational fallback).  Circle predicates use plain floating evaluation
with the documented tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import DegenerateTriangleError, GeometryError


@dataclass(frozen=True)
class Tolerance:
    """Degeneracy and distance thresholds for unit-scale data."""

    eps_pred: float = 1e-12
    eps_dist: float = 1e-9

    def __post_init__(self):
        if not (0.0 < self.eps_pred <= self.eps_dist < 1.0):
            raise ValueError("need 0 < eps_pred <= eps_dist < 1")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("point coordinates must be finite")

    def dist(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self):
        return (self.x, self.y)


@dataclass(frozen=True)
class Line2:
    """Oriented line a*x + b*y = c with (a, b) unit; positive side is a*x+b*y > c."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        norm = math.hypot(self.a, self.b)
        if norm == 0.0 or not math.isfinite(norm):
            raise GeometryError("line normal must be nonzero and finite")
        if abs(norm - 1.0) > 1e-9:
            object.__setattr__(self, "a", self.a / norm)
            object.__setattr__(self, "b", self.b / norm)
            object.__setattr__(self, "c", self.c / norm)

    @classmethod
    def through_points(cls, p: Point2, q: Point2) -> "Line2":
        """Line through p and q; positive side is to the left of the p->q direction."""
        dx, dy = q.x - p.x, q.y - p.y
        norm = math.hypot(dx, dy)
        if norm == 0.0:
            raise GeometryError("coincident points do not define a line")
        a, b = -dy / norm, dx / norm
        return cls(a, b, a * p.x + b * p.y)

    @classmethod
    def through_point_angle(cls, p: Point2, theta: float) -> "Line2":
        """Line through p with direction angle theta; positive side to the left."""
        a, b = -math.sin(theta), math.cos(theta)
        return cls(a, b, a * p.x + b * p.y)

    def side(self, p: Point2) -> float:
        """Signed distance of p from the line (positive on the positive side)."""
        return self.a * p.x + self.b * p.y - self.c

    def flipped(self) -> "Line2":
        return Line2(-self.a, -self.b, -self.c)

    def direction_angle(self) -> float:
        """Angle of the line direction, in [0, pi)."""
        # The direction vector of the line is (b, -a).
        return math.atan2(-self.a, self.b) % math.pi

    def foot(self, p: Point2) -> Point2:
        s = self.side(p)
        return Point2(p.x - s * self.a, p.y - s * self.b)


@dataclass(frozen=True)
class Circle2:
    center: Point2
    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise GeometryError("circle radius must be positive and finite")


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    det = (Fraction(bx) - Fraction(ax)) * (Fraction(cy) - Fraction(ay)) - (
        Fraction(by) - Fraction(ay)
    ) * (Fraction(cx) - Fraction(ax))
    return (det > 0) - (det < 0)


def orient2d(p: Point2, q: Point2, r: Point2) -> int:
    """Sign of the signed area of triangle pqr: +1 ccw, -1 cw, 0 collinear.

    Exact for double inputs: floating filter plus rational fallback.
    """
    detleft = (q.x - p.x) * (r.y - p.y)
    detright = (q.y - p.y) * (r.x - p.x)
    det = detleft - detright
    errbound = 3.3306690738754716e-16 * (abs(detleft) + abs(detright))
    if det > errbound:
        return 1
    if det < -errbound:
        return -1
    return _orient_exact(p.x, p.y, q.x, q.y, r.x, r.y)


def orient2d_batch(ax, ay, bx, by, pxs, pys) -> np.ndarray:
    """Exact orientation signs of (a, b, p_i) for arrays of points p."""
    pxs = np.asarray(pxs, dtype=np.float64)
    pys = np.asarray(pys, dtype=np.float64)
    det, err = kernels.orient_det(ax, ay, bx, by, pxs, pys)
    signs = np.zeros(det.shape, dtype=np.int8)
    signs[det > err] = 1
    signs[det < -err] = -1
    uncertain = np.abs(det) <= err
    if uncertain.any():
        for i in np.flatnonzero(uncertain):
            signs[i] = _orient_exact(ax, ay, bx, by, pxs[i], pys[i])
    return signs


def circumcircle(p: Point2, q: Point2, r: Point2) -> Circle2:
    """Circle through three non-collinear points."""
    if orient2d(p, q, r) == 0:
        raise DegenerateTriangleError("collinear points have no circumcircle")
    d = 2.0 * (p.x * (q.y - r.y) + q.x * (r.y - p.y) + r.x * (p.y - q.y))
    p2, q2, r2 = p.x**2 + p.y**2, q.x**2 + q.y**2, r.x**2 + r.y**2
    ux = (p2 * (q.y - r.y) + q2 * (r.y - p.y) + r2 * (p.y - q.y)) / d
    uy = (p2 * (r.x - q.x) + q2 * (p.x - r.x) + r2 * (q.x - p.x)) / d
    center = Point2(ux, uy)
    return Circle2(center, center.dist(p))


def line_circle_intersect(line: Line2, circle: Circle2, tol: Tolerance = DEFAULT_TOL):
    """Intersection points of an oriented line and a circle (0, 1, or 2 points).

    Tangency within eps_pred of the discriminant returns the single foot point.
    """
    s = line.side(circle.center)
    r = circle.radius
    disc = r * r - s * s
    foot = line.foot(circle.center)
    if abs(disc) <= tol.eps_pred * max(1.0, r * r):
        return [foot]
    if disc < 0.0:
        return []
    h = math.sqrt(disc)
    dx, dy = line.b, -line.a  # unit direction along the line
    return [
        Point2(foot.x - h * dx, foot.y - h * dy),
        Point2(foot.x + h * dx, foot.y + h * dy),
    ]


def circle_circle_intersect(c1: Circle2, c2: Circle2, tol: Tolerance = DEFAULT_TOL):
    """Intersection points of two circles (0, 1, or 2 points)."""
    dx = c2.center.x - c1.center.x
    dy = c2.center.y - c1.center.y
    d = math.hypot(dx, dy)
    if d <= tol.eps_pred:
        return []  # concentric
    r1, r2 = c1.radius, c2.radius
    # Distance from c1 along the center line to the radical line.
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    disc = r1 * r1 - a * a
    mx = c1.center.x + a * dx / d
    my = c1.center.y + a * dy / d
    if abs(disc) <= tol.eps_pred * max(1.0, r1 * r1):
        return [Point2(mx, my)]
    if disc < 0.0:
        return []
    h = math.sqrt(disc)
    ox, oy = -dy / d * h, dx / d * h
    return [Point2(mx - ox, my - oy), Point2(mx + ox, my + oy)]


@dataclass(frozen=True)
class UnitSquareTransform:
    """Affine map (uniform scale + translation) taking raw input into [0, 1]^2.

    Uniform scaling keeps circles circles and preserves fatness, so ranges can
    be mapped alongside the points.
    """

    scale: float
    ox: float
    oy: float

    @classmethod
    def fit(cls, xs, ys) -> "UnitSquareTransform":
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        if xs.size == 0:
            return cls(1.0, 0.0, 0.0)
        w = float(xs.max() - xs.min())
        h = float(ys.max() - ys.min())
        span = max(w, h)
        scale = 1.0 / span if span > 0.0 else 1.0
        return cls(scale, float(xs.min()), float(ys.min()))

    def apply(self, xs, ys):
        return (np.asarray(xs) - self.ox) * self.scale, (np.asarray(ys) - self.oy) * self.scale

    def apply_point(self, p: Point2) -> Point2:
        return Point2((p.x - self.ox) * self.scale, (p.y - self.oy) * self.scale)

    def invert_point(self, p: Point2) -> Point2:
        return Point2(p.x / self.scale + self.ox, p.y / self.scale + self.oy)

    def apply_length(self, d: float) -> float:
        return d * self.scale

    def invert_length(self, d: float) -> float:
        return d / self.scale

    def apply_circle(self, c: Circle2) -> Circle2:
        return Circle2(self.apply_point(c.center), c.radius * self.scale)

    def apply_line(self, line: Line2) -> Line2:
        # a*x + b*y = c with x = x'/s + ox  =>  a*x' + b*y' = s*(c - a*ox - b*oy)
        return Line2(line.a, line.b, self.scale * (line.c - line.a * self.ox - line.b * self.oy))
