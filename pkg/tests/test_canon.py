import math

import numpy as np
import pytest

from shallowrange.canon import (
    OrientationSet,
    TestSet,
    canonical_lines,
    cover_cap,
    cover_triangle,
    enumerate_canonical_caps,
    enumerate_canonical_triangles,
    strictly_inside_count,
)
from shallowrange.errors import NotNEmptyError
from shallowrange.gen import random_cap, random_fat_triangle
from shallowrange.geom import Point2
from shallowrange.ranges import ClippedWedge

ALPHA = math.pi / 6


def net_of(P, k=24, seed=0):
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(P.xs), size=k, replace=False)
    return [Point2(P.xs[i], P.ys[i]) for i in idx]


def sample_in_triangle(tri, rng, k):
    w = rng.dirichlet(np.ones(3), size=k)
    vx = np.array([v.x for v in tri.vertices])
    vy = np.array([v.y for v in tri.vertices])
    return w @ vx, w @ vy


def sample_in_cap(cap, rng, k):
    xs, ys = [], []
    bb = cap.bbox()
    while len(xs) < k:
        px = rng.uniform(bb.xmin, bb.xmax, 4 * k)
        py = rng.uniform(bb.ymin, bb.ymax, 4 * k)
        m = cap.contains_points(px, py)
        xs.extend(px[m])
        ys.extend(py[m])
    return np.array(xs[:k]), np.array(ys[:k])


def test_orientation_grid_size():
    assert len(OrientationSet.for_alpha(math.pi / 3)) == 25
    assert len(OrientationSet.for_alpha(math.pi / 6)) == 49


def test_canonical_lines_count():
    pts = [Point2(0.1, 0.1), Point2(0.9, 0.2), Point2(0.5, 0.8),
           Point2(0.3, 0.6), Point2(0.7, 0.4)]
    D = OrientationSet.for_alpha(math.pi / 3)
    # C(5,2) two-point lines plus 5 * 25 point-orientation lines
    assert len(canonical_lines(pts, D)) == 135


def _random_empty_triangle(rng, N):
    while True:
        tri = random_fat_triangle(rng, ALPHA, radius_hi=0.08)
        if strictly_inside_count(tri, N) == 0:
            return tri


def _random_empty_cap(rng, N):
    while True:
        cap = random_cap(rng, radius_hi=0.08)
        if strictly_inside_count(cap, N) == 0:
            return cap


def test_cover_triangle_contract(small_points, rng):
    N = net_of(small_points)
    D = OrientationSet.for_alpha(ALPHA / 2)
    for _ in range(40):
        tri = _random_empty_triangle(rng, N)
        cover = cover_triangle(tri, N, D)
        assert 1 <= len(cover) <= 8
        for piece in cover:
            assert strictly_inside_count(piece, N) == 0
        px, py = sample_in_triangle(tri, rng, 500)
        covered = np.zeros(500, dtype=bool)
        for piece in cover:
            covered |= piece.contains_points(px, py)
        assert covered.all()


def test_cover_cap_contract(small_points, rng):
    N = net_of(small_points)
    D = OrientationSet.for_alpha(math.pi / 6)
    for _ in range(40):
        cap = _random_empty_cap(rng, N)
        cover = cover_cap(cap, N, D)
        assert 1 <= len(cover) <= 8
        for piece in cover:
            assert strictly_inside_count(piece, N) == 0
        px, py = sample_in_cap(cap, rng, 500)
        covered = np.zeros(500, dtype=bool)
        for piece in cover:
            covered |= piece.contains_points(px, py)
        assert covered.all()


def test_cover_rejects_deep_range_in_emptiness_mode(small_points, rng):
    N = net_of(small_points)
    D = OrientationSet.for_alpha(ALPHA / 2)
    while True:
        tri = random_fat_triangle(rng, ALPHA, radius_lo=0.3, radius_hi=0.35)
        if strictly_inside_count(tri, N) > 0:
            break
    with pytest.raises(NotNEmptyError):
        cover_triangle(tri, N, D)


def test_reporting_mode_accepts_deep_ranges(small_points, rng):
    N = net_of(small_points)
    D = OrientationSet.for_alpha(ALPHA / 2)
    tri = random_fat_triangle(rng, ALPHA, radius_lo=0.3, radius_hi=0.35)
    cover = cover_triangle(tri, N, D, mode="reporting")
    assert 1 <= len(cover) <= 8


def test_enumerate_with_empty_net_is_whole_box():
    out = enumerate_canonical_triangles([], math.pi / 3)
    assert len(out.ranges) == 1
    assert isinstance(out.ranges[0], ClippedWedge)


def test_enumerate_triangles_budget(rng):
    N = [Point2(x, y) for x, y in rng.uniform(0.2, 0.8, (4, 2))]
    out = enumerate_canonical_triangles(N, math.pi / 3, budget=200, seed=1)
    assert 0 < len(out.ranges) <= 200
    for r in out.ranges:
        assert strictly_inside_count(r, N) == 0


def test_enumerate_caps_budget(rng):
    N = [Point2(x, y) for x, y in rng.uniform(0.2, 0.8, (4, 2))]
    out = enumerate_canonical_caps(N, OrientationSet.for_alpha(math.pi / 3),
                                   budget=200, seed=1)
    assert 0 < len(out.ranges) <= 200
    for r in out.ranges:
        assert strictly_inside_count(r, N) == 0


def test_test_set_json_round_trip(tmp_path, rng):
    N = [Point2(x, y) for x, y in rng.uniform(0.2, 0.8, (4, 2))]
    ts = enumerate_canonical_triangles(N, math.pi / 3, budget=50, seed=2)
    path = str(tmp_path / "ts.json")
    ts.dump(path)
    back = TestSet.load(path)
    assert len(back.ranges) == len(ts.ranges)
    xs = rng.uniform(0, 1, 100)
    ys = rng.uniform(0, 1, 100)
    for a, b in zip(ts.ranges, back.ranges):
        assert np.array_equal(a.contains_points(xs, ys), b.contains_points(xs, ys))
