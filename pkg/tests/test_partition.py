import math

import numpy as np
import pytest

from shallowrange.canon import TestSet
from shallowrange.errors import MalformedInputError
from shallowrange.gen import random_points
from shallowrange.partition import (
    ZetaProfile,
    build_tree,
    covering_test_set,
    full_partition,
    half_partition,
    load_tree,
    profile_for,
    save_tree,
)
from shallowrange.ranges import FAMILY_CAP, FAMILY_TRIANGLE

ALPHA = math.pi / 6


@pytest.mark.parametrize("family", [FAMILY_TRIANGLE, FAMILY_CAP])
def test_zeta_inverse_round_trip(family):
    prof = profile_for(family)
    for r in (2.0, 10.0, 1e3, 1e6):
        m = prof.zeta_inv(r)
        assert prof.zeta(m) == pytest.approx(r, rel=1e-6)


def test_zeta_profiles_distinct():
    t = ZetaProfile(FAMILY_TRIANGLE)
    c = ZetaProfile(FAMILY_CAP)
    # caps pay an extra polylog factor per point
    assert c.zeta(1000.0) > t.zeta(1000.0)


def _test_set(P, family, seed=0):
    return covering_test_set(P, 8.0, family, ALPHA, seed=seed, n_queries=20)


def test_covering_test_set_nonempty(small_points):
    ts = _test_set(small_points, FAMILY_TRIANGLE)
    assert isinstance(ts, TestSet)
    assert len(ts.ranges) > 0


def test_half_partition_contract(small_points):
    n = len(small_points)
    r = 8.0
    ts = _test_set(small_points, FAMILY_TRIANGLE)
    part = half_partition(small_points, ts.ranges, r, seed=3,
                          family=FAMILY_TRIANGLE)
    size = n // int(r)
    seen = set()
    for cls in part.classes:
        assert len(cls.indices) == size
        assert cls.cell.contains_points(small_points.xs[cls.indices],
                                        small_points.ys[cls.indices]).all()
        assert not seen & set(cls.indices)
        seen |= set(cls.indices)
    assert part.covered >= (n + 1) // 2


def test_full_partition_contract(small_points):
    n = len(small_points)
    r = 8.0
    ts = _test_set(small_points, FAMILY_CAP, seed=1)
    part = full_partition(small_points, ts.ranges, r, seed=5, family=FAMILY_CAP)
    assert len(part.classes) <= 2 * int(r)
    size = n // int(r)
    seen = []
    for cls in part.classes:
        assert 0 < len(cls.indices) <= size or cls.is_leftover
        assert len(cls.indices) <= size
        seen.extend(cls.indices)
    # exact partition of the index set
    assert sorted(seen) == list(range(n))


def test_full_partition_deterministic(small_points):
    ts = _test_set(small_points, FAMILY_TRIANGLE)
    a = full_partition(small_points, ts.ranges, 8.0, seed=9,
                       family=FAMILY_TRIANGLE)
    b = full_partition(small_points, ts.ranges, 8.0, seed=9,
                       family=FAMILY_TRIANGLE)
    assert len(a.classes) == len(b.classes)
    for ca, cb in zip(a.classes, b.classes):
        assert np.array_equal(ca.indices, cb.indices)


@pytest.mark.parametrize("family", [FAMILY_TRIANGLE, FAMILY_CAP])
def test_build_tree_indices_partition(family):
    P = random_points(512, "uniform", seed=21)
    tree = build_tree(P, family, ALPHA, r=8.0, leaf_size=64, seed=2,
                      n_queries=15)
    assert sorted(tree.root.indices) == list(range(512))

    def walk(node):
        if node.is_leaf:
            return list(node.indices)
        got = []
        for ch in node.children:
            got.extend(walk(ch))
        assert sorted(got) == sorted(node.indices)
        return got

    walk(tree.root)
    assert tree.root.count_nodes() > 1


def test_build_tree_deterministic():
    P = random_points(256, "clustered", seed=4)
    a = build_tree(P, FAMILY_TRIANGLE, ALPHA, leaf_size=64, seed=11,
                   n_queries=15)
    b = build_tree(P, FAMILY_TRIANGLE, ALPHA, leaf_size=64, seed=11,
                   n_queries=15)
    assert a.root.count_nodes() == b.root.count_nodes()

    def sig(node):
        return (tuple(node.indices), [sig(c) for c in node.children])

    assert sig(a.root) == sig(b.root)


def test_save_load_round_trip(tmp_path):
    P = random_points(256, "uniform", seed=8)
    tree = build_tree(P, FAMILY_CAP, ALPHA, leaf_size=64, seed=6, n_queries=15)
    path = str(tmp_path / "t.shtr")
    save_tree(tree, path)
    back = load_tree(path)
    assert back.family == tree.family
    assert back.r == tree.r
    assert np.array_equal(back.P.xs, tree.P.xs)
    assert back.root.count_nodes() == tree.root.count_nodes()

    def pairs(a, b):
        assert np.array_equal(np.sort(a.indices), np.sort(b.indices))
        assert a.is_leaf == b.is_leaf
        assert len(a.children) == len(b.children)
        for ca, cb in zip(a.children, b.children):
            pairs(ca, cb)

    pairs(tree.root, back.root)


def test_load_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.shtr"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(MalformedInputError):
        load_tree(str(path))


def test_load_rejects_truncated_file(tmp_path):
    P = random_points(128, "uniform", seed=8)
    tree = build_tree(P, FAMILY_TRIANGLE, ALPHA, leaf_size=64, seed=6,
                      n_queries=10)
    path = str(tmp_path / "t.shtr")
    save_tree(tree, path)
    data = open(path, "rb").read()
    with open(path, "wb") as f:
        f.write(data[:-16])
    with pytest.raises(MalformedInputError):
        load_tree(path)
