"""Partition trees built from weighted shallow cuttings.

A half partition extracts classes of exactly floor(n/r) points, each confined
to one cutting cell, until at least half of the input is covered; crossing
ranges double their sampling weight, which caps how many classes any one test
range can cross.  Halving r and repeating gives a full partition with at most
2r classes, and recursing yields the tree.
"""

from __future__ import annotations

import json
import math
import struct
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .canon import (OrientationSet, TestSet, cover_cap, cover_triangle,
                    strictly_inside_count)
from .cells import GLOBAL_BOX, ArcCurve, Box, ElementaryCell, SegCurve, box_cell
from .decomp import Cutting, WeightedRanges, shallow_cutting
from .errors import CuttingQualityError, MalformedInputError, PartitionStalledError
from .gen import random_cap, random_fat_triangle
from .geom import DEFAULT_TOL, Tolerance
from .nets import DELTA_VC_CAP, DELTA_VC_TRIANGLE, draw_shallow_net
from .points import PointSet
from .ranges import (CellRelation, FAMILY_CAP, FAMILY_TRIANGLE, Range,
                     relate_cells)

# ---------------------------------------------------------------------------
# union-complexity profiles


@dataclass(frozen=True)
class ZetaProfile:
    """Union-size profile zeta(m) and its inverse, per range family."""

    family: str

    def zeta(self, m: float) -> float:
        if m <= 0:
            return 0.0
        if self.family == FAMILY_TRIANGLE:
            ll = math.log(math.log(m)) if m > math.e else 0.0
            return m * max(1.0, ll)
        if self.family == FAMILY_CAP:
            return m * math.log(m + 2.0) ** 2
        raise ValueError(f"unknown family {self.family!r}")

    def zeta_inv(self, r: float) -> float:
        """Smallest m with zeta(m) >= r, by bisection (zeta is increasing)."""
        if r <= 0:
            return 0.0
        lo, hi = 0.0, max(2.0, r)
        while self.zeta(hi) < r:
            hi *= 2.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.zeta(mid) >= r:
                hi = mid
            else:
                lo = mid
        return hi


def profile_for(family: str) -> ZetaProfile:
    return ZetaProfile(family)


# ---------------------------------------------------------------------------
# test sets from covering closures


def covering_test_set(
    P: PointSet,
    r: float,
    family: str,
    angle: float,
    seed: int = 0,
    n_queries: int = 40,
    budget: Optional[int] = None,
    q: float = 0.5,
    a: float = 1.0,
    box: Box = GLOBAL_BOX,
    tol: Tolerance = DEFAULT_TOL,
) -> TestSet:
    """Draw a shallow net and close a batch of random queries under covering.

    The resulting canonical ranges stand in for every admissible query: any
    admissible range is covered by ranges of the same shape family, so crossing
    bounds certified on the test set transfer to live queries.
    """
    delta_vc = DELTA_VC_TRIANGLE if family == FAMILY_TRIANGLE else DELTA_VC_CAP
    net = draw_shallow_net(P, r, q=q, a=a, delta_vc=delta_vc, seed=seed)
    N = [P.point(i) for i in net.sample]
    grid_alpha = angle / 2.0 if family == FAMILY_TRIANGLE else math.pi / 6.0
    D = OrientationSet.for_alpha(grid_alpha)
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF, 0x7E57]))

    ranges: List[Range] = []
    seen = set()
    limit = max(0, len(P) // max(int(r), 1))
    draws = 0
    while draws < 4 * n_queries and len(ranges) < 4 * n_queries:
        draws += 1
        if family == FAMILY_TRIANGLE:
            query = random_fat_triangle(rng, angle, radius_hi=0.15)
            cover = cover_triangle(query, N, D, mode="reporting", box=box, tol=tol)
        else:
            query = random_cap(rng, beta_min=angle, radius_hi=0.15)
            cover = cover_cap(query, N, D, beta=angle, mode="reporting", box=box, tol=tol)
        for rg in cover:
            # only openly net-empty pieces belong in the test set; deep
            # pieces would poison the cutting samples
            if strictly_inside_count(rg, N, tol) > 0:
                continue
            key = hash(json.dumps(rg.to_json(), sort_keys=True))
            if key in seen:
                continue
            seen.add(key)
            ranges.append(rg)
    if budget is not None and len(ranges) > budget:
        ranges = ranges[:budget]
    params = {"r": r, "family": family, "angle": angle, "seed": seed,
              "n_queries": n_queries, "shallow_limit": limit}
    return TestSet(ranges, [], net.sample, params)


# ---------------------------------------------------------------------------
# half and full partitions


@dataclass
class PartitionClass:
    indices: np.ndarray  # global point indices, sorted
    cell: ElementaryCell
    is_leftover: bool = False


@dataclass
class Partition:
    classes: List[PartitionClass]
    kappa: np.ndarray  # final per-range crossing counts over chosen cells
    stats: dict = field(default_factory=dict)

    @property
    def covered(self) -> int:
        return sum(len(c.indices) for c in self.classes)


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([p & 0xFFFFFFFF for p in parts]).generate_state(1)[0])


def _dense_box_cell(xs: np.ndarray, ys: np.ndarray, k: int) -> ElementaryCell:
    """Axis-aligned box cell enclosing >= k of the given points, kept tight.

    Last-resort carving when no cutting cell holds a full class; the crossing
    ranges of this cell are still charged to the weight log, so the audit
    stays honest even on this path.
    """
    m = len(xs)
    order = np.argsort(xs, kind="stable")
    w = min(m, max(2 * k, k + 8))
    sx = xs[order]
    spans = sx[w - 1:] - sx[:m - w + 1]
    i0 = int(np.argmin(spans))
    window = order[i0:i0 + w]
    wy = ys[window]
    yorder = np.argsort(wy, kind="stable")
    sy = wy[yorder]
    yspans = sy[k - 1:] - sy[:w - k + 1]
    j0 = int(np.argmin(yspans))
    pad = 1e-9 + 1e-9 * max(abs(sx[i0]), abs(sx[i0 + w - 1]), abs(sy[j0]), 1.0)
    return box_cell(Box(sx[i0] - pad, sy[j0] - pad,
                        sx[i0 + w - 1] + pad, sy[j0 + k - 1] + pad))


def half_partition(
    P: PointSet,
    Q: Sequence[Range],
    r: float,
    active: Optional[np.ndarray] = None,
    class_size: Optional[int] = None,
    seed: int = 0,
    profile: Optional[ZetaProfile] = None,
    family: str = FAMILY_TRIANGLE,
    c_t: float = 0.25,
    c_s: float = 4.0,
    max_attempts: int = 6,
    kappa: Optional[np.ndarray] = None,
    allow_partial: bool = False,
    tol: Tolerance = DEFAULT_TOL,
) -> Partition:
    """Cover at least half of the active points with classes of fixed size.

    Each round builds a weighted shallow cutting of the test set, picks the
    cell holding the most unassigned points, carves one class out of it, and
    doubles the weight of every range crossing that cell.
    """
    if not Q:
        raise ValueError("need a nonempty test set")
    if active is None:
        active = np.arange(len(P), dtype=np.int64)
    n = len(active)
    if class_size is None:
        class_size = int(n // r)
    if class_size < 1:
        raise ValueError("class size would be empty; lower r")
    if profile is None:
        profile = profile_for(family)
    if kappa is None:
        kappa = np.zeros(len(Q), dtype=np.int64)
    t = max(2, int(c_t * profile.zeta_inv(r)))

    unassigned = np.ones(n, dtype=bool)
    axs, ays = P.xs[active], P.ys[active]
    classes: List[PartitionClass] = []
    rounds = 0
    fallback_boxes = 0
    while n - int(unassigned.sum()) < (n + 1) // 2 and int(unassigned.sum()) >= class_size:
        cutting: Optional[Cutting] = None
        chosen = -1
        for attempt in range(max_attempts):
            # fragmentation, not crossing weight, is the usual failure mode:
            # coarsen the cutting on retries so cells hold more points
            t_try = max(2, t >> (attempt // 3))
            c_s_try = max(c_s / (2 ** min(attempt, 3)), 1.0)
            s = _derived_seed(seed, rounds, attempt)
            try:
                cutting = shallow_cutting(WeightedRanges(list(Q), kappa), t_try,
                                          seed=s, c_s=c_s_try, tol=tol)
            except CuttingQualityError:
                continue
            ux, uy = axs[unassigned], ays[unassigned]
            best = -1
            for j, cell in enumerate(cutting.cells):
                cnt = int(cell.contains_points(ux, uy).sum())
                if cnt > best:
                    best, chosen = cnt, j
            if best >= class_size:
                break
            chosen = -1
        if chosen < 0 or cutting is None:
            if allow_partial and classes:
                break
            # the cuttings fragmented too finely for this point density;
            # carve from a tight box around the densest unassigned spot
            pos = np.flatnonzero(unassigned)
            cell = _dense_box_cell(axs[pos], ays[pos], class_size)
            inside = pos[cell.contains_points(axs[pos], ays[pos])]
            if len(inside) < class_size:
                raise PartitionStalledError(
                    f"no cell holds {class_size} unassigned points "
                    f"after {max_attempts} attempts (round {rounds})"
                )
            take = inside[:class_size]
            unassigned[take] = False
            classes.append(PartitionClass(np.sort(active[take]), cell))
            for i, rg in enumerate(Q):
                if relate_cells(rg, [cell], tol)[0] == CellRelation.CROSSING:
                    kappa[i] += 1
            fallback_boxes += 1
            rounds += 1
            continue
        # carve as many classes as this cutting supports before resampling
        while (n - int(unassigned.sum()) < (n + 1) // 2
               and int(unassigned.sum()) >= class_size):
            pos = np.flatnonzero(unassigned)
            best, chosen = -1, -1
            for j, cell in enumerate(cutting.cells):
                cnt = int(cell.contains_points(axs[pos], ays[pos]).sum())
                if cnt > best:
                    best, chosen = cnt, j
            if best < class_size:
                break
            cell = cutting.cells[chosen]
            inside = pos[cell.contains_points(axs[pos], ays[pos])]
            take = inside[:class_size]  # lowest indices for determinism
            unassigned[take] = False
            classes.append(PartitionClass(np.sort(active[take]), cell))
            kappa[cutting.crossing_lists[chosen]] += 1
        rounds += 1

    stats = {"rounds": rounds, "t": t, "class_size": class_size, "n": n,
             "fallback_boxes": fallback_boxes,
             "covered": sum(len(c.indices) for c in classes)}
    return Partition(classes, kappa, stats)


def full_partition(
    P: PointSet,
    Q: Sequence[Range],
    r: float,
    active: Optional[np.ndarray] = None,
    seed: int = 0,
    family: str = FAMILY_TRIANGLE,
    profile: Optional[ZetaProfile] = None,
    c_t: float = 0.25,
    c_s: float = 4.0,
    tol: Tolerance = DEFAULT_TOL,
) -> Partition:
    """Partition all points into at most 2r classes of size at most n/r.

    Repeats half partitions with r halved each stage, so class sizes stay
    capped by floor(n/r); whatever is left at the end becomes one leftover
    class attached to the bounding box.
    """
    if active is None:
        active = np.arange(len(P), dtype=np.int64)
    n = len(active)
    if profile is None:
        profile = profile_for(family)
    class_size = int(n // r)
    if class_size < 1:
        raise ValueError("class size would be empty; lower r")
    kappa = np.zeros(len(Q), dtype=np.int64)
    classes: List[PartitionClass] = []
    remaining = active
    r_i = float(r)
    stage = 0
    max_classes = int(2 * r) - 1  # keep one slot for the leftover class
    while len(remaining) > class_size:
        r_eff = max(2.0, r_i)
        # stages may stall when one cell must hold a large fraction of the
        # remainder; shrinking the class size keeps every class <= n/r anyway
        half = None
        for shrink in (1, 2, 4):
            size = max(1, class_size // shrink)
            if len(remaining) <= size:
                break
            k_try = kappa.copy()  # failed attempts must not leak weight updates
            try:
                half = half_partition(P, Q, r_eff, active=remaining, class_size=size,
                                      seed=_derived_seed(seed, 101, stage, shrink),
                                      profile=profile, family=family, c_t=c_t,
                                      c_s=c_s, kappa=k_try, allow_partial=shrink > 1,
                                      tol=tol)
                kappa[:] = k_try
                break
            except PartitionStalledError:
                continue
        if half is None or not half.classes:
            raise PartitionStalledError(
                f"stage {stage} stalled with {len(remaining)} points remaining"
            )
        classes.extend(half.classes)
        taken = np.concatenate([c.indices for c in half.classes])
        remaining = np.setdiff1d(remaining, taken, assume_unique=True)
        r_i /= 2.0
        stage += 1
        if len(classes) > max_classes and len(remaining) > class_size:
            raise PartitionStalledError(
                f"class budget 2r exhausted with {len(remaining)} points remaining"
            )
        if stage > 4 * math.ceil(math.log2(max(r, 2))) + 8:
            raise PartitionStalledError("halving stages exceeded expected bound")
    if len(remaining):
        classes.append(PartitionClass(np.sort(remaining), box_cell(), is_leftover=True))
    stats = {"stages": stage, "classes": len(classes), "class_size": class_size, "n": n}
    return Partition(classes, kappa, stats)


# ---------------------------------------------------------------------------
# the tree


@dataclass
class TreeNode:
    cell: ElementaryCell
    indices: np.ndarray  # global indices of all points under this node
    children: List["TreeNode"] = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    is_leftover: bool = False

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def count_nodes(self) -> int:
        return 1 + sum(ch.count_nodes() for ch in self.children)

    def depth(self) -> int:
        return 1 + (max(ch.depth() for ch in self.children) if self.children else 0)


@dataclass
class PartitionTree:
    P: PointSet
    family: str
    angle: float  # alpha for triangles, beta for caps
    r: float
    leaf_size: int
    seed: int
    root: TreeNode
    stats: dict = field(default_factory=dict)

    def count_nodes(self) -> int:
        return self.root.count_nodes()


def build_tree(
    P: PointSet,
    family: str,
    angle: float,
    r: float = 8.0,
    leaf_size: int = 128,
    seed: int = 0,
    n_queries: int = 40,
    budget: Optional[int] = None,
    c_t: float = 0.25,
    c_s: float = 4.0,
    tol: Tolerance = DEFAULT_TOL,
) -> PartitionTree:
    """Build a partition tree; every internal node gets a fresh net and test set.

    A node that cannot be partitioned at parameter r retries at r/2 and, if
    that also stalls, becomes a leaf.
    """
    if family not in (FAMILY_TRIANGLE, FAMILY_CAP):
        raise ValueError(f"unknown family {family!r}")
    profile = profile_for(family)
    t0 = time.perf_counter()
    build_stats = {"stalled_nodes": 0, "internal_nodes": 0, "leaves": 0}

    def _build(indices: np.ndarray, cell: ElementaryCell, depth: int, node_seed: int) -> TreeNode:
        node = TreeNode(cell, indices, stats={"n": int(len(indices)), "depth": depth})
        if len(indices) <= leaf_size:
            build_stats["leaves"] += 1
            return node
        sub = P.take(indices)
        Q = covering_test_set(sub, r, family, angle, seed=_derived_seed(node_seed, 7),
                              n_queries=n_queries, budget=budget, tol=tol).ranges
        part: Optional[Partition] = None
        # doubling r shrinks the class size, which is the easier direction
        # when no single cell holds enough points
        for r_try in (r, 2.0 * r):
            if int(len(indices) // r_try) < 1 or r_try < 2.0:
                continue
            try:
                part = full_partition(P, Q, r_try, active=indices,
                                      seed=_derived_seed(node_seed, 11), family=family,
                                      profile=profile, c_t=c_t, c_s=c_s, tol=tol)
                node.stats["r"] = r_try
                break
            except PartitionStalledError:
                continue
        if part is None or len(part.classes) <= 1:
            build_stats["stalled_nodes"] += 1
            build_stats["leaves"] += 1
            return node
        build_stats["internal_nodes"] += 1
        node.stats["num_q"] = len(Q)
        node.stats["max_crossing"] = int(part.kappa.max()) if len(part.kappa) else 0
        for ci, cls in enumerate(part.classes):
            ch = _build(cls.indices, cls.cell, depth + 1, _derived_seed(node_seed, 13, ci))
            ch.is_leftover = cls.is_leftover
            node.children.append(ch)
        return node

    root = _build(np.arange(len(P), dtype=np.int64), box_cell(), 0, seed)
    build_stats["build_seconds"] = time.perf_counter() - t0
    return PartitionTree(P, family, angle, r, leaf_size, seed, root, build_stats)


# ---------------------------------------------------------------------------
# binary serialization: magic, version, header, then nodes in preorder

MAGIC = b"SHTR"
VERSION = 1
_FAMILY_TAGS = {FAMILY_TRIANGLE: 0, FAMILY_CAP: 1}
_FAMILY_NAMES = {v: k for k, v in _FAMILY_TAGS.items()}


def _pack_curve(buf: bytearray, curve):
    if isinstance(curve, SegCurve):
        buf += struct.pack("<B4d", 0, curve.x0, curve.y0, curve.x1, curve.y1)
    elif isinstance(curve, ArcCurve):
        buf += struct.pack("<B6d", 1, curve.cx, curve.cy, curve.r,
                           float(curve.branch), curve.x0, curve.x1)
    else:
        raise MalformedInputError(f"cannot serialize curve {type(curve).__name__}")


def _unpack_curve(mv: memoryview, off: int):
    (tag,) = struct.unpack_from("<B", mv, off)
    off += 1
    if tag == 0:
        vals = struct.unpack_from("<4d", mv, off)
        return SegCurve(*vals), off + 32
    if tag == 1:
        cx, cy, rr, branch, x0, x1 = struct.unpack_from("<6d", mv, off)
        return ArcCurve(cx, cy, rr, int(branch), x0, x1), off + 48
    raise MalformedInputError(f"bad curve tag {tag}")


def _pack_node(buf: bytearray, node: TreeNode):
    flags = (1 if node.is_leaf else 0) | (2 if node.is_leftover else 0)
    buf += struct.pack("<B", flags)
    buf += struct.pack("<2d", node.cell.x_left, node.cell.x_right)
    _pack_curve(buf, node.cell.bottom)
    _pack_curve(buf, node.cell.top)
    st = node.stats
    buf += struct.pack("<IdI", st.get("num_q", 0), float(st.get("max_crossing", 0)),
                       st.get("depth", 0))
    buf += struct.pack("<d", float(st.get("r", 0.0)))
    buf += struct.pack("<I", len(node.children))
    if node.is_leaf:
        buf += struct.pack("<Q", len(node.indices))
        buf += np.asarray(node.indices, dtype="<i8").tobytes()
    for ch in node.children:
        _pack_node(buf, ch)


def _unpack_node(mv: memoryview, off: int, counter: List[int]):
    (flags,) = struct.unpack_from("<B", mv, off)
    off += 1
    x_left, x_right = struct.unpack_from("<2d", mv, off)
    off += 16
    bottom, off = _unpack_curve(mv, off)
    top, off = _unpack_curve(mv, off)
    num_q, max_crossing, depth = struct.unpack_from("<IdI", mv, off)
    off += 16
    (r_node,) = struct.unpack_from("<d", mv, off)
    off += 8
    (n_children,) = struct.unpack_from("<I", mv, off)
    off += 4
    cell = ElementaryCell(x_left, x_right, bottom, top, counter[0])
    counter[0] += 1
    node = TreeNode(cell, np.array([], dtype=np.int64), [],
                    {"num_q": num_q, "max_crossing": max_crossing,
                     "depth": depth, "r": r_node},
                    is_leftover=bool(flags & 2))
    if flags & 1:
        (cnt,) = struct.unpack_from("<Q", mv, off)
        off += 8
        node.indices = np.frombuffer(mv, dtype="<i8", count=cnt, offset=off).astype(np.int64)
        off += 8 * cnt
    for _ in range(n_children):
        ch, off = _unpack_node(mv, off, counter)
        node.children.append(ch)
    if node.children:
        node.indices = np.sort(np.concatenate([ch.indices for ch in node.children]))
    node.stats["n"] = int(len(node.indices))
    return node, off


def save_tree(tree: PartitionTree, path: str, mode: str = "reporting"):
    """Write the binary tree plus a JSON stats sidecar at path + '.stats.json'."""
    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<I", VERSION)
    buf += struct.pack("<BB", _FAMILY_TAGS[tree.family], 1 if mode == "reporting" else 0)
    buf += struct.pack("<ddIQ", tree.angle, tree.r, tree.leaf_size,
                       tree.seed & 0xFFFFFFFFFFFFFFFF)
    buf += struct.pack("<Q", len(tree.P))
    buf += np.asarray(tree.P.xs, dtype="<f8").tobytes()
    buf += np.asarray(tree.P.ys, dtype="<f8").tobytes()
    _pack_node(buf, tree.root)
    with open(path, "wb") as f:
        f.write(bytes(buf))
    sidecar = {
        "family": tree.family, "angle": tree.angle, "r": tree.r,
        "leaf_size": tree.leaf_size, "seed": tree.seed, "n": len(tree.P),
        "nodes": tree.count_nodes(), "depth": tree.root.depth(),
        "build": tree.stats,
    }
    with open(path + ".stats.json", "w") as f:
        json.dump(sidecar, f, indent=2)


def load_tree(path: str) -> PartitionTree:
    with open(path, "rb") as f:
        data = f.read()
    mv = memoryview(data)
    if bytes(mv[:4]) != MAGIC:
        raise MalformedInputError("bad magic; not a partition tree file")
    (version,) = struct.unpack_from("<I", mv, 4)
    if version != VERSION:
        raise MalformedInputError(f"unsupported version {version}")
    try:
        fam_tag, _mode = struct.unpack_from("<BB", mv, 8)
        angle, r, leaf_size, seed = struct.unpack_from("<ddIQ", mv, 10)
        off = 10 + struct.calcsize("<ddIQ")
        (n,) = struct.unpack_from("<Q", mv, off)
        off += 8
        xs = np.frombuffer(mv, dtype="<f8", count=n, offset=off).astype(np.float64)
        off += 8 * n
        ys = np.frombuffer(mv, dtype="<f8", count=n, offset=off).astype(np.float64)
        off += 8 * n
        root, off = _unpack_node(mv, off, [0])
    except (struct.error, ValueError) as e:
        raise MalformedInputError(f"truncated or corrupt tree file: {e}") from e
    if off != len(data):
        raise MalformedInputError(f"{len(data) - off} trailing bytes after tree")
    return PartitionTree(PointSet(xs, ys), _FAMILY_NAMES[fam_tag], angle, r,
                         int(leaf_size), int(seed), root, {})
