import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shallowrange.geom import (
    Circle2,
    Line2,
    Point2,
    circle_circle_intersect,
    circumcircle,
    line_circle_intersect,
    orient2d,
    UnitSquareTransform,
)

coord = st.floats(min_value=-100, max_value=100, allow_nan=False)


def test_orient2d_basic():
    a, b = Point2(0, 0), Point2(1, 0)
    assert orient2d(a, b, Point2(0, 1)) > 0
    assert orient2d(a, b, Point2(0, -1)) < 0
    assert orient2d(a, b, Point2(2, 0)) == 0


def test_orient2d_near_degenerate_is_exact():
    # collinear up to the last ulp; the exact fallback must say zero
    a = Point2(0.1, 0.1)
    b = Point2(0.3, 0.3)
    c = Point2(0.7, 0.7)
    assert orient2d(a, b, c) == 0


@given(coord, coord, coord, coord, coord, coord)
@settings(max_examples=200, deadline=None)
def test_orient2d_antisymmetry(ax, ay, bx, by, cx, cy):
    a, b, c = Point2(ax, ay), Point2(bx, by), Point2(cx, cy)
    assert orient2d(a, b, c) == -orient2d(b, a, c)


@given(coord, coord, coord, coord, coord, coord)
@settings(max_examples=200, deadline=None)
def test_orient2d_cyclic(ax, ay, bx, by, cx, cy):
    a, b, c = Point2(ax, ay), Point2(bx, by), Point2(cx, cy)
    assert orient2d(a, b, c) == orient2d(b, c, a) == orient2d(c, a, b)


def test_circumcircle_example():
    c = circumcircle(Point2(0, 0), Point2(2, 0), Point2(1, 1))
    assert c.center.dist(Point2(1, 0)) < 1e-12
    assert abs(c.radius - 1.0) < 1e-12


def test_line_through_points_orientation():
    ln = Line2.through_points(Point2(0, 0), Point2(1, 0))
    # positive side is to the left of the direction p -> q
    assert ln.side(Point2(0.5, 1.0)) > 0
    assert ln.side(Point2(0.5, -1.0)) < 0
    assert abs(ln.side(Point2(7.0, 0.0))) < 1e-12


def test_line_flip_and_foot():
    ln = Line2.through_points(Point2(0, 0), Point2(0, 1))
    assert ln.flipped().side(Point2(1, 0)) == -ln.side(Point2(1, 0))
    f = ln.foot(Point2(3, 5))
    assert f.dist(Point2(0, 5)) < 1e-12


def test_line_circle_intersect_secant_and_tangent():
    circ = Circle2(Point2(0, 0), 1.0)
    hits = line_circle_intersect(Line2(0.0, 1.0, 0.0), circ)
    assert len(hits) == 2
    xs = sorted(p.x for p in hits)
    assert abs(xs[0] + 1) < 1e-12 and abs(xs[1] - 1) < 1e-12
    tang = line_circle_intersect(Line2(0.0, 1.0, 1.0), circ)
    assert len(tang) == 1
    assert tang[0].dist(Point2(0, 1)) < 1e-9
    assert line_circle_intersect(Line2(0.0, 1.0, 2.0), circ) == []


def test_circle_circle_intersect():
    a = Circle2(Point2(0, 0), 1.0)
    b = Circle2(Point2(1, 0), 1.0)
    hits = circle_circle_intersect(a, b)
    assert len(hits) == 2
    for p in hits:
        assert abs(p.x - 0.5) < 1e-12
        assert abs(abs(p.y) - math.sqrt(3) / 2) < 1e-12
    assert circle_circle_intersect(a, Circle2(Point2(5, 0), 1.0)) == []


def test_unit_square_transform_round_trip(rng):
    xs = rng.uniform(-40, 75, 64)
    ys = rng.uniform(3, 9, 64)
    tr = UnitSquareTransform.fit(xs, ys)
    ux, uy = tr.apply(xs, ys)
    assert ux.min() >= -1e-12 and ux.max() <= 1 + 1e-12
    assert uy.min() >= -1e-12 and uy.max() <= 1 + 1e-12
    p = Point2(xs[5], ys[5])
    back = tr.invert_point(tr.apply_point(p))
    assert back.dist(p) < 1e-9
