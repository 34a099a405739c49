import math

import numpy as np
import pytest

from shallowrange.cells import Box, box_cell
from shallowrange.errors import ChordOutsideDiskError, DegenerateTriangleError
from shallowrange.gen import random_cap, random_fat_triangle
from shallowrange.geom import Circle2, Line2, Point2
from shallowrange.ranges import (
    CellRelation,
    CircularCap,
    ClippedWedge,
    FatTriangle,
    range_from_json,
    relate_cell,
)


def unit_triangle():
    return FatTriangle((Point2(0.2, 0.2), Point2(0.8, 0.2), Point2(0.5, 0.7)))


def test_triangle_membership_is_closed():
    tri = unit_triangle()
    xs = np.array([0.5, 0.2, 0.5, 0.05])
    ys = np.array([0.4, 0.2, 0.2, 0.05])
    assert list(tri.contains_points(xs, ys)) == [True, True, True, False]


def test_triangle_normalizes_to_ccw():
    cw = FatTriangle((Point2(0.2, 0.2), Point2(0.5, 0.7), Point2(0.8, 0.2)))
    ccw = unit_triangle()
    assert cw.contains_points(np.array([0.5]), np.array([0.4]))[0]
    assert {v.as_tuple() for v in cw.vertices} == {v.as_tuple() for v in ccw.vertices}


def test_degenerate_triangle_rejected():
    with pytest.raises(DegenerateTriangleError):
        FatTriangle((Point2(0, 0), Point2(1, 1), Point2(2, 2)))


def test_min_interior_angle_equilateral():
    tri = FatTriangle((Point2(0, 0), Point2(1, 0), Point2(0.5, math.sqrt(3) / 2)))
    assert abs(tri.min_interior_angle() - math.pi / 3) < 1e-9


def test_cap_central_angle_example():
    # radius 2, chord at signed offset 1 from the center: angle 2*acos(-1/2)
    cap = CircularCap(Circle2(Point2(0, 0), 2.0), Line2(0.0, 1.0, -1.0))
    assert abs(cap.central_angle() - 4 * math.pi / 3) < 1e-9


def test_semidisk_central_angle():
    cap = CircularCap(Circle2(Point2(0, 0), 1.0), Line2(0.0, 1.0, 0.0))
    assert abs(cap.central_angle() - math.pi) < 1e-12


def test_chord_outside_disk_rejected():
    with pytest.raises(ChordOutsideDiskError):
        CircularCap(Circle2(Point2(0, 0), 1.0), Line2(0.0, 1.0, 5.0))


def test_cap_membership():
    cap = CircularCap(Circle2(Point2(0.5, 0.5), 0.3), Line2(0.0, 1.0, 0.5))
    xs = np.array([0.5, 0.5, 0.5, 0.9])
    ys = np.array([0.7, 0.3, 0.5, 0.5])
    # above the chord and inside the disk; the chord itself counts
    assert list(cap.contains_points(xs, ys)) == [True, False, True, False]


def test_range_json_round_trip(rng):
    for _ in range(20):
        tri = random_fat_triangle(rng, math.pi / 6)
        cap = random_cap(rng)
        for r in (tri, cap):
            back = range_from_json(r.to_json())
            xs = rng.uniform(0, 1, 200)
            ys = rng.uniform(0, 1, 200)
            assert np.array_equal(r.contains_points(xs, ys),
                                  back.contains_points(xs, ys))


def test_clipped_wedge_whole_box():
    w = ClippedWedge((), Box(0, 0, 1, 1))
    xs = np.array([0.5, 2.0])
    ys = np.array([0.5, 0.5])
    assert list(w.contains_points(xs, ys)) == [True, False]


def test_relate_cell_trichotomy():
    tri = unit_triangle()
    inside = box_cell(Box(0.45, 0.25, 0.55, 0.35))
    crossing = box_cell(Box(0.0, 0.0, 0.5, 0.5))
    outside = box_cell(Box(0.85, 0.85, 0.95, 0.95))
    assert relate_cell(tri, inside) == CellRelation.CONTAINED
    assert relate_cell(tri, crossing) == CellRelation.CROSSING
    assert relate_cell(tri, outside) == CellRelation.DISJOINT


def test_relate_cell_range_inside_cell():
    tri = FatTriangle((Point2(0.4, 0.4), Point2(0.6, 0.4), Point2(0.5, 0.6)))
    big = box_cell(Box(0.0, 0.0, 1.0, 1.0))
    assert relate_cell(tri, big) == CellRelation.CROSSING


def test_generated_triangles_are_fat(rng):
    for _ in range(100):
        tri = random_fat_triangle(rng, math.pi / 6)
        assert tri.min_interior_angle() >= math.pi / 6 - 1e-9


def test_generated_caps_are_at_least_semidisks(rng):
    for _ in range(100):
        cap = random_cap(rng, beta_min=math.pi)
        assert cap.central_angle() >= math.pi - 1e-9
