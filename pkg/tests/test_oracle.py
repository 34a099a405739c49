import math

import numpy as np

from shallowrange.cells import Box
from shallowrange.gen import random_fat_triangle, random_points
from shallowrange.geom import Line2, Point2
from shallowrange.oracle import (
    brute_count,
    brute_crossing_number,
    brute_empty,
    brute_mask,
    brute_nearest_above,
    brute_report,
)
from shallowrange.points import PointSet
from shallowrange.ranges import ClippedWedge, FatTriangle


def bounding_wedge():
    return ClippedWedge((), Box(-1.0, -1.0, 2.0, 2.0))


def test_whole_box_counts_everything(small_points):
    rg = bounding_wedge()
    assert brute_count(small_points, rg) == len(small_points)
    assert list(brute_report(small_points, rg)) == list(range(len(small_points)))
    assert not brute_empty(small_points, rg)


def test_mask_report_count_agree(small_points, rng):
    tri = random_fat_triangle(rng, math.pi / 6)
    mask = brute_mask(small_points, tri)
    rep = brute_report(small_points, tri)
    assert brute_count(small_points, tri) == int(mask.sum()) == len(rep)
    assert list(rep) == sorted(np.flatnonzero(mask).tolist())


def test_nearest_above_basics():
    P = PointSet(np.array([0.0, 3.0, 1.0]), np.array([1.0, 1.0, -1.0]))
    line = Line2(0.0, 1.0, 0.0)
    res = brute_nearest_above(P, Point2(0.0, 0.5), line)
    assert res == (0, 0.5)
    below = Line2(0.0, 1.0, 5.0)
    assert brute_nearest_above(P, Point2(0.0, 6.0), below) is None


def test_nearest_ties_pick_lowest_index():
    P = PointSet(np.array([1.0, -1.0]), np.array([0.0, 0.0]))
    line = Line2(0.0, 1.0, -1.0)
    res = brute_nearest_above(P, Point2(0.0, 0.0), line)
    assert res == (0, 1.0)


def test_crossing_number_counts_partial_overlaps(small_points):
    from shallowrange.cells import box_cell

    cells = [box_cell(Box(0.0, 0.0, 0.5, 0.5)),
             box_cell(Box(0.5, 0.0, 1.0, 0.5))]
    tri = FatTriangle((Point2(0.4, 0.1), Point2(0.6, 0.1), Point2(0.5, 0.3)))
    # triangle straddles the shared edge: crosses both cells
    assert brute_crossing_number(tri, cells) == 2
    # a range strictly inside one cell crosses exactly that cell
    tiny = FatTriangle((Point2(0.1, 0.1), Point2(0.2, 0.1), Point2(0.15, 0.2)))
    assert brute_crossing_number(tiny, cells) == 1
    far = FatTriangle((Point2(0.1, 0.8), Point2(0.3, 0.8), Point2(0.2, 0.95)))
    assert brute_crossing_number(far, cells) == 0
