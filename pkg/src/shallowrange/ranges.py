"""Query ranges: fat triangles, circular caps, and their canonization helpers.

Every range implements `contains_points` (vectorized membership with the
documented tolerance slack), `boundary_elements` (x-monotone curves plus
vertical segments, for decompositions and crossing tests), `bbox`, and
`sample_point` (a witness point inside the range).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .cells import (
    ArcCurve,
    BoundaryElement,
    Box,
    ElementaryCell,
    GLOBAL_BOX,
    SegCurve,
    VSeg,
    element_intersections,
)
from .errors import ChordOutsideDiskError, DegenerateTriangleError, GeometryError
from .geom import (
    DEFAULT_TOL,
    Circle2,
    Line2,
    Point2,
    Tolerance,
    line_circle_intersect,
    orient2d,
    orient2d_batch,
)

FAMILY_TRIANGLE = "triangle"
FAMILY_CAP = "cap"


def clip_line_to_box(line: Line2, box: Box, tol: Tolerance = DEFAULT_TOL):
    """Portion of a line inside a box, as a SegCurve, VSeg, or None."""
    a, b, c = line.a, line.b, line.c
    if abs(b) <= tol.eps_pred:
        x = c / a
        if box.xmin - tol.eps_dist <= x <= box.xmax + tol.eps_dist:
            return VSeg(x, box.ymin, box.ymax)
        return None
    # y(x) = (c - a*x) / b; solve ymin <= y(x) <= ymax for x.
    x0, x1 = box.xmin, box.xmax
    if abs(a) > tol.eps_pred:
        xa = (c - b * box.ymin) / a
        xb = (c - b * box.ymax) / a
        lo, hi = min(xa, xb), max(xa, xb)
        x0, x1 = max(x0, lo), min(x1, hi)
    if x1 - x0 <= tol.eps_dist:
        return None
    y0 = (c - a * x0) / b
    y1 = (c - a * x1) / b
    return SegCurve(x0, y0, x1, y1)


@dataclass(frozen=True)
class FatTriangle:
    """Closed triangle, stored with counterclockwise vertex order."""

    vertices: Tuple[Point2, Point2, Point2]

    family = FAMILY_TRIANGLE
    kind = "fat_triangle"

    def __post_init__(self):
        v = tuple(self.vertices)
        if len(v) != 3:
            raise GeometryError("a triangle needs exactly three vertices")
        o = orient2d(*v)
        if o == 0:
            raise DegenerateTriangleError("triangle vertices are collinear")
        if o < 0:
            object.__setattr__(self, "vertices", (v[0], v[2], v[1]))
        else:
            object.__setattr__(self, "vertices", v)

    def edges(self):
        v = self.vertices
        return [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])]

    def angles(self) -> Tuple[float, float, float]:
        v = self.vertices
        out = []
        for i in range(3):
            p, q, r = v[i], v[(i + 1) % 3], v[(i + 2) % 3]
            u = (q.x - p.x, q.y - p.y)
            w = (r.x - p.x, r.y - p.y)
            dot = u[0] * w[0] + u[1] * w[1]
            cross = u[0] * w[1] - u[1] * w[0]
            out.append(abs(math.atan2(cross, dot)))
        return tuple(out)

    def min_interior_angle(self) -> float:
        return min(self.angles())

    def is_fat(self, alpha: float, slack: float = 1e-9) -> bool:
        return self.min_interior_angle() >= alpha - slack

    def contains_points(self, xs, ys, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        mask = np.ones(xs.shape, dtype=bool)
        for p, q in self.edges():
            # ccw order: inside means on or left of every directed edge
            mask &= orient2d_batch(p.x, p.y, q.x, q.y, xs, ys) >= 0
        return mask

    def boundary_elements(self, box: Box = GLOBAL_BOX, tol: Tolerance = DEFAULT_TOL) -> List[BoundaryElement]:
        out: List[BoundaryElement] = []
        for p, q in self.edges():
            if abs(p.x - q.x) <= tol.eps_pred:
                ylo, yhi = min(p.y, q.y), max(p.y, q.y)
                if yhi > ylo:
                    out.append(VSeg(0.5 * (p.x + q.x), ylo, yhi))
            elif p.x < q.x:
                out.append(SegCurve(p.x, p.y, q.x, q.y))
            else:
                out.append(SegCurve(q.x, q.y, p.x, p.y))
        return out

    def bbox(self, box: Box = GLOBAL_BOX) -> Box:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return Box(min(xs), min(ys), max(xs), max(ys))

    def sample_point(self) -> Point2:
        v = self.vertices
        return Point2(
            (v[0].x + v[1].x + v[2].x) / 3.0,
            (v[0].y + v[1].y + v[2].y) / 3.0,
        )

    def to_json(self):
        return {"type": "fat_triangle", "vertices": [[p.x, p.y] for p in self.vertices]}


@dataclass(frozen=True)
class Halfplane:
    """Closed halfplane: the positive side of an oriented line."""

    line: Line2

    family = FAMILY_TRIANGLE
    kind = "halfplane"

    def contains_points(self, xs, ys, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        ys = np.ascontiguousarray(ys, dtype=np.float64)
        return kernels.halfplane_mask(xs, ys, self.line.a, self.line.b, self.line.c, tol.eps_pred)

    def boundary_elements(self, box: Box = GLOBAL_BOX, tol: Tolerance = DEFAULT_TOL) -> List[BoundaryElement]:
        e = clip_line_to_box(self.line, box, tol)
        return [e] if e is not None else []

    def bbox(self, box: Box = GLOBAL_BOX) -> Box:
        return box

    def sample_point(self) -> Point2:
        f = Point2(self.line.a * self.line.c, self.line.b * self.line.c)
        return Point2(f.x + self.line.a, f.y + self.line.b)

    def to_json(self):
        return {"type": "halfplane", "line": [self.line.a, self.line.b, self.line.c]}


@dataclass(frozen=True)
class Disk:
    """Closed disk."""

    circle: Circle2

    family = FAMILY_CAP
    kind = "disk"

    def contains_points(self, xs, ys, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        ys = np.ascontiguousarray(ys, dtype=np.float64)
        c = self.circle
        return kernels.disk_mask(xs, ys, c.center.x, c.center.y, c.radius, tol.eps_dist)

    def boundary_elements(self, box: Box = GLOBAL_BOX, tol: Tolerance = DEFAULT_TOL) -> List[BoundaryElement]:
        c = self.circle
        return [
            ArcCurve(c.center.x, c.center.y, c.radius, -1, c.center.x - c.radius, c.center.x + c.radius),
            ArcCurve(c.center.x, c.center.y, c.radius, 1, c.center.x - c.radius, c.center.x + c.radius),
        ]

    def bbox(self, box: Box = GLOBAL_BOX) -> Box:
        c = self.circle
        return Box(
            c.center.x - c.radius,
            c.center.y - c.radius,
            c.center.x + c.radius,
            c.center.y + c.radius,
        )

    def sample_point(self) -> Point2:
        return self.circle.center

    def to_json(self):
        c = self.circle
        return {"type": "disk", "center": [c.center.x, c.center.y], "radius": c.radius}


@dataclass(frozen=True)
class CircularCap:
    """Closed circular cap: disk intersected with the positive side of the chord line."""

    circle: Circle2
    chord: Line2

    family = FAMILY_CAP
    kind = "cap"

    def __post_init__(self):
        s = abs(self.chord.side(self.circle.center))
        if s >= self.circle.radius:
            raise ChordOutsideDiskError(
                f"chord at distance {s:.6g} does not cut disk of radius {self.circle.radius:.6g}"
            )

    def center_offset(self) -> float:
        """Signed distance of the disk center from the chord (positive inside the cap)."""
        return self.chord.side(self.circle.center)

    def central_angle(self) -> float:
        """Angle subtended at the center by the cap arc, in (0, 2*pi)."""
        return 2.0 * math.acos(-self.center_offset() / self.circle.radius)

    def is_major(self) -> bool:
        return self.center_offset() > 0.0

    def chord_endpoints(self, tol: Tolerance = DEFAULT_TOL):
        pts = line_circle_intersect(self.chord, self.circle, tol)
        if len(pts) == 1:
            pts = pts * 2
        return pts

    def contains_points(self, xs, ys, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        ys = np.ascontiguousarray(ys, dtype=np.float64)
        c = self.circle
        inside = kernels.disk_mask(xs, ys, c.center.x, c.center.y, c.radius, tol.eps_dist)
        inside &= kernels.halfplane_mask(xs, ys, self.chord.a, self.chord.b, self.chord.c, tol.eps_pred)
        return inside

    def boundary_elements(self, box: Box = GLOBAL_BOX, tol: Tolerance = DEFAULT_TOL) -> List[BoundaryElement]:
        c = self.circle
        p1, p2 = self.chord_endpoints(tol)
        out: List[BoundaryElement] = []
        # chord segment
        if abs(p1.x - p2.x) <= tol.eps_pred:
            ylo, yhi = min(p1.y, p2.y), max(p1.y, p2.y)
            if yhi > ylo:
                out.append(VSeg(0.5 * (p1.x + p2.x), ylo, yhi))
        elif p1.x < p2.x:
            out.append(SegCurve(p1.x, p1.y, p2.x, p2.y))
        else:
            out.append(SegCurve(p2.x, p2.y, p1.x, p1.y))
        # arc pieces: split each circle branch at chord endpoints, keep cap-side pieces
        xl, xr = c.center.x - c.radius, c.center.x + c.radius
        for branch in (-1, 1):
            cuts = sorted({xl, xr} | {p.x for p in (p1, p2) if xl < p.x < xr})
            for a, b in zip(cuts[:-1], cuts[1:]):
                if b - a <= tol.eps_dist:
                    continue
                arc = ArcCurve(c.center.x, c.center.y, c.radius, branch, a, b)
                xm = 0.5 * (a + b)
                ym = float(arc.y_at(xm))
                if self.chord.side(Point2(xm, ym)) >= -tol.eps_dist:
                    out.append(arc)
        return out

    def bbox(self, box: Box = GLOBAL_BOX) -> Box:
        c = self.circle
        return Box(
            c.center.x - c.radius,
            c.center.y - c.radius,
            c.center.x + c.radius,
            c.center.y + c.radius,
        )

    def sample_point(self) -> Point2:
        # midpoint between the chord and the cap arc, along the chord normal
        c = self.circle
        s = self.center_offset()
        foot = self.chord.foot(c.center)
        depth = c.radius + s  # distance from foot to the arc, on the cap side
        h = 0.5 * min(depth, c.radius)
        return Point2(foot.x + h * self.chord.a, foot.y + h * self.chord.b)

    def to_json(self):
        c = self.circle
        return {
            "type": "cap",
            "center": [c.center.x, c.center.y],
            "radius": c.radius,
            "chord": [self.chord.a, self.chord.b, self.chord.c],
        }


@dataclass(frozen=True)
class ClippedWedge:
    """Intersection of halfplanes, clipped to a box.

    Produced by canonization when an expansion becomes unbounded.  An empty
    line tuple means the whole box.
    """

    lines: Tuple[Line2, ...]
    box: Box = GLOBAL_BOX

    family = FAMILY_TRIANGLE
    kind = "wedge"

    def contains_points(self, xs, ys, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        ys = np.ascontiguousarray(ys, dtype=np.float64)
        mask = (
            (xs >= self.box.xmin - tol.eps_dist)
            & (xs <= self.box.xmax + tol.eps_dist)
            & (ys >= self.box.ymin - tol.eps_dist)
            & (ys <= self.box.ymax + tol.eps_dist)
        )
        for ln in self.lines:
            mask &= kernels.halfplane_mask(xs, ys, ln.a, ln.b, ln.c, tol.eps_pred)
        return mask

    def boundary_elements(self, box: Box = GLOBAL_BOX, tol: Tolerance = DEFAULT_TOL) -> List[BoundaryElement]:
        out: List[BoundaryElement] = []
        for ln in self.lines:
            e = clip_line_to_box(ln, self.box, tol)
            if e is not None:
                out.append(e)
        return out

    def bbox(self, box: Box = GLOBAL_BOX) -> Box:
        return self.box

    def sample_point(self) -> Point2:
        # best-effort: average of pairwise line intersections pushed inside
        pts = []
        for i in range(len(self.lines)):
            for j in range(i + 1, len(self.lines)):
                l1, l2 = self.lines[i], self.lines[j]
                den = l1.a * l2.b - l1.b * l2.a
                if abs(den) < 1e-12:
                    continue
                x = (l1.c * l2.b - l1.b * l2.c) / den
                y = (l1.a * l2.c - l1.c * l2.a) / den
                pts.append((x, y))
        if pts:
            x = sum(p[0] for p in pts) / len(pts)
            y = sum(p[1] for p in pts) / len(pts)
        elif self.lines:
            ln = self.lines[0]
            x, y = ln.a * ln.c, ln.b * ln.c
        else:
            return Point2(0.5 * (self.box.xmin + self.box.xmax), 0.5 * (self.box.ymin + self.box.ymax))
        for ln in self.lines:
            s = ln.a * x + ln.b * y - ln.c
            if s < 0:
                x -= 2.0 * s * ln.a
                y -= 2.0 * s * ln.b
        return Point2(x, y)

    def to_json(self):
        return {"type": "wedge", "lines": [[l.a, l.b, l.c] for l in self.lines]}


Range = Union[FatTriangle, Halfplane, Disk, CircularCap, ClippedWedge]


def range_from_json(obj) -> Range:
    t = obj.get("type")
    if t == "fat_triangle":
        return FatTriangle(tuple(Point2(*v) for v in obj["vertices"]))
    if t == "halfplane":
        return Halfplane(Line2(*obj["line"]))
    if t == "disk":
        return Disk(Circle2(Point2(*obj["center"]), obj["radius"]))
    if t == "cap":
        return CircularCap(Circle2(Point2(*obj["center"]), obj["radius"]), Line2(*obj["chord"]))
    if t == "wedge":
        return ClippedWedge(tuple(Line2(*l) for l in obj["lines"]))
    raise GeometryError(f"unknown range type {t!r}")


def contains_point(rng: Range, p: Point2, tol: Tolerance = DEFAULT_TOL) -> bool:
    return bool(rng.contains_points(np.array([p.x]), np.array([p.y]), tol)[0])


class CellRelation(enum.IntEnum):
    DISJOINT = 0
    CROSSING = 1
    CONTAINED = 2


def _boxes_disjoint(a: Box, b: Box, eps: float) -> bool:
    return (
        a.xmax < b.xmin - eps
        or b.xmax < a.xmin - eps
        or a.ymax < b.ymin - eps
        or b.ymax < a.ymin - eps
    )


def _boundary_hits_cell(rng_elems, cell: ElementaryCell, tol: Tolerance) -> bool:
    cell_elems = cell.boundary_elements()
    for re_ in rng_elems:
        for ce in cell_elems:
            if element_intersections(re_, ce, tol):
                return True
    return False


def relate_cell(rng: Range, cell: ElementaryCell, tol: Tolerance = DEFAULT_TOL) -> CellRelation:
    return relate_cells(rng, [cell], tol)[0]


def relate_cells(rng: Range, cells: Sequence[ElementaryCell], tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Classify each cell as DISJOINT, CROSSING, or CONTAINED w.r.t. the range.

    Probe points decide the common case in one vectorized membership call;
    boundary-element intersection tests guard against probes all landing on
    one side of a boundary that still dips into the cell.
    """
    out = np.full(len(cells), CellRelation.CROSSING, dtype=np.int8)
    rbox = rng.bbox()
    witness = rng.sample_point()

    probe_list = []
    offsets = [0]
    active = []
    for i, cell in enumerate(cells):
        if _boxes_disjoint(rbox, cell.bounds(), tol.eps_dist):
            out[i] = CellRelation.DISJOINT
            continue
        px, py = cell.probe_points()
        probe_list.append((px, py))
        offsets.append(offsets[-1] + len(px))
        active.append(i)

    if not active:
        return out

    allx = np.concatenate([p[0] for p in probe_list])
    ally = np.concatenate([p[1] for p in probe_list])
    mask = rng.contains_points(allx, ally, tol)

    rng_elems = None
    for k, i in enumerate(active):
        m = mask[offsets[k] : offsets[k + 1]]
        if m.all():
            cand = CellRelation.CONTAINED
        elif not m.any():
            cand = CellRelation.DISJOINT
        else:
            out[i] = CellRelation.CROSSING
            continue
        if rng_elems is None:
            rng_elems = rng.boundary_elements(GLOBAL_BOX, tol)
        cell = cells[i]
        if _boundary_hits_cell(rng_elems, cell, tol):
            out[i] = CellRelation.CROSSING
        elif cand == CellRelation.DISJOINT and cell.contains_point(witness, tol.eps_dist):
            # range sits entirely inside the cell
            out[i] = CellRelation.CROSSING
        else:
            out[i] = cand
    return out
