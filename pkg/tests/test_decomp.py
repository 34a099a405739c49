import math

import numpy as np
import pytest

from shallowrange.cells import Box, box_cell
from shallowrange.decomp import (
    WeightedRanges,
    shallow_cutting,
    union_boundary_vertices,
    union_complement_decompose,
    weighted_sample_no_replace,
)
from shallowrange.gen import random_cap, random_fat_triangle
from shallowrange.geom import Circle2, Line2, Point2
from shallowrange.ranges import CircularCap, Disk, FatTriangle


def _coverage_check(ranges, cells, rng, n_probes=5000):
    """Probes outside the union must land in exactly one cell."""
    xs = rng.uniform(-0.2, 1.2, n_probes)
    ys = rng.uniform(-0.2, 1.2, n_probes)
    in_union = np.zeros(n_probes, dtype=bool)
    for r in ranges:
        in_union |= r.contains_points(xs, ys)
    cover = np.zeros(n_probes, dtype=np.int32)
    for c in cells:
        cover += c.contains_points(xs, ys).astype(np.int32)
    outside = ~in_union
    uncovered = int((cover[outside] == 0).sum())
    # points can straddle shared cell boundaries, never interiors
    overcovered = int((cover > 2).sum())
    return uncovered, overcovered


def test_empty_input_gives_single_cell():
    cells = union_complement_decompose([])
    assert len(cells) == 1


def test_decompose_one_triangle(rng):
    tri = FatTriangle((Point2(0.3, 0.3), Point2(0.7, 0.3), Point2(0.5, 0.6)))
    cells = union_complement_decompose([tri])
    uncovered, over = _coverage_check([tri], cells, rng)
    assert uncovered == 0
    assert over == 0


def test_decompose_mixed_ranges(rng):
    ranges = [random_fat_triangle(rng, math.pi / 6, radius_hi=0.2) for _ in range(6)]
    ranges += [random_cap(rng, radius_hi=0.2) for _ in range(6)]
    cells = union_complement_decompose(ranges)
    uncovered, over = _coverage_check(ranges, cells, rng)
    assert uncovered == 0
    assert over == 0


def test_union_boundary_vertices_two_disks():
    a = Disk(Circle2(Point2(0.4, 0.5), 0.2))
    b = Disk(Circle2(Point2(0.6, 0.5), 0.2))
    assert union_boundary_vertices([a, b]) == 2
    far = Disk(Circle2(Point2(0.9, 0.9), 0.05))
    assert union_boundary_vertices([a, far]) == 0


def test_weighted_sampling_without_replacement(rng):
    kappa = np.array([0, 0, 10, 0], dtype=np.int64)
    hits = np.zeros(4)
    for _ in range(200):
        chosen = weighted_sample_no_replace(kappa, 2, rng)
        assert len(set(chosen)) == 2
        for c in chosen:
            hits[c] += 1
    assert hits[2] == 200  # weight 2^10 dominates, index 2 always drawn


def test_weighted_sampling_k_exceeds_population(rng):
    kappa = np.zeros(3, dtype=np.int64)
    assert sorted(weighted_sample_no_replace(kappa, 10, rng)) == [0, 1, 2]


@pytest.mark.parametrize("r", [2, 4, 8])
def test_cutting_contracts(rng, r):
    ranges = [random_fat_triangle(rng, math.pi / 6, radius_hi=0.12) for _ in range(40)]
    kappa = rng.integers(0, 3, 40).astype(np.int64)
    wr = WeightedRanges(ranges, kappa)
    cut = shallow_cutting(wr, r, seed=5)
    W = wr.total_weight()
    # property (ii): per-cell crossing weight within W/r
    for cl in cut.crossing_lists:
        assert wr.total_weight(cl) <= W // r + (1 if W % r else 0)
    # property (i): probes outside the union of all witnesses are covered
    uncovered, _ = _coverage_check([ranges[i] for i in cut.uncovered_witnesses],
                                   cut.cells, rng, n_probes=1000)
    assert uncovered == 0


def test_cutting_deterministic(rng):
    ranges = [random_cap(rng, radius_hi=0.15) for _ in range(30)]
    wr1 = WeightedRanges(ranges, np.zeros(30, dtype=np.int64))
    wr2 = WeightedRanges(ranges, np.zeros(30, dtype=np.int64))
    c1 = shallow_cutting(wr1, 4, seed=77)
    c2 = shallow_cutting(wr2, 4, seed=77)
    assert len(c1.cells) == len(c2.cells)
    assert c1.crossing_lists == c2.crossing_lists
