"""Query engine over partition trees.

Answers are always exact: the descent only decides which point subsets get the
vectorized membership test, never whether a candidate point is dropped.  The
crossing threshold guards against degenerate descents by falling back to a
direct scan of the subtree, which also never flips an answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import MalformedInputError
from .geom import DEFAULT_TOL, Circle2, Line2, Point2, Tolerance
from .partition import PartitionTree, TreeNode, profile_for
from .ranges import CellRelation, CircularCap, Range, relate_cells


@dataclass
class QueryStats:
    nodes_visited: int = 0
    leaves_scanned: int = 0
    fallbacks: int = 0
    contained_skips: int = 0
    points_tested: int = 0


def kappa_threshold(tree: PartitionTree, node: TreeNode, c_kappa: float = 4.0) -> float:
    """Crossing budget per node: c_k * (r / zeta_inv(r) + log2|Q| * log2 r)."""
    r = max(float(node.stats.get("r", tree.r)), 2.0)
    num_q = max(int(node.stats.get("num_q", 1)), 2)
    zinv = max(profile_for(tree.family).zeta_inv(r), 1.0)
    return c_kappa * (r / zinv + math.log2(num_q) * math.log2(r))


def _scan(tree: PartitionTree, indices: np.ndarray, rng_: Range,
          stats: QueryStats, tol: Tolerance) -> np.ndarray:
    stats.points_tested += len(indices)
    if len(indices) == 0:
        return indices
    mask = rng_.contains_points(tree.P.xs[indices], tree.P.ys[indices], tol)
    return indices[mask]


def _descend(tree: PartitionTree, node: TreeNode, rng_: Range, bbox,
             stats: QueryStats, out: List[np.ndarray], c_kappa: float,
             early_out: bool, tol: Tolerance) -> bool:
    """Collect matching indices under node; returns True if any were found."""
    stats.nodes_visited += 1
    if node.is_leaf:
        stats.leaves_scanned += 1
        hit = _scan(tree, node.indices, rng_, stats, tol)
        if len(hit):
            out.append(hit)
            return True
        return False
    rel = relate_cells(rng_, [ch.cell for ch in node.children], tol)
    crossing = [ch for ch, rl in zip(node.children, rel) if rl == CellRelation.CROSSING]
    if len(crossing) > kappa_threshold(tree, node, c_kappa):
        # never conclude anything from the threshold itself; just scan
        stats.fallbacks += 1
        hit = _scan(tree, node.indices, rng_, stats, tol)
        if len(hit):
            out.append(hit)
            return True
        return False
    found = False
    for ch, rl in zip(node.children, rel):
        if rl == CellRelation.CONTAINED:
            # the cell sits inside the range, so its points do too; the mask
            # test is kept to make answers exact under tolerance skew
            stats.contained_skips += 1
            hit = _scan(tree, ch.indices, rng_, stats, tol)
        elif rl == CellRelation.CROSSING:
            if _descend(tree, ch, rng_, bbox, stats, out, c_kappa, early_out, tol):
                found = True
                if early_out:
                    return True
            continue
        else:
            # a disjoint verdict is probe-based; points near the shared
            # boundary are re-checked through a bbox prefilter
            if len(ch.indices) == 0:
                continue
            xs, ys = tree.P.xs[ch.indices], tree.P.ys[ch.indices]
            cand = ch.indices[(xs >= bbox[0]) & (xs <= bbox[2])
                              & (ys >= bbox[1]) & (ys <= bbox[3])]
            hit = _scan(tree, cand, rng_, stats, tol)
        if len(hit):
            out.append(hit)
            found = True
            if early_out:
                return True
    return found


def _range_bbox(rng_: Range):
    bb = getattr(rng_, "bbox", None)
    if callable(bb):
        box = bb()
        return (box.xmin, box.ymin, box.xmax, box.ymax)
    return (-math.inf, -math.inf, math.inf, math.inf)


def query_report(tree: PartitionTree, rng_: Range, c_kappa: float = 4.0,
                 tol: Tolerance = DEFAULT_TOL) -> Tuple[np.ndarray, QueryStats]:
    """Sorted indices of all points inside the range."""
    stats = QueryStats()
    out: List[np.ndarray] = []
    _descend(tree, tree.root, rng_, _range_bbox(rng_), stats, out, c_kappa, False, tol)
    if not out:
        return np.array([], dtype=np.int64), stats
    return np.sort(np.concatenate(out)), stats


def query_empty(tree: PartitionTree, rng_: Range, c_kappa: float = 4.0,
                tol: Tolerance = DEFAULT_TOL) -> Tuple[bool, QueryStats]:
    """True when no point lies in the range; exits on the first witness."""
    stats = QueryStats()
    out: List[np.ndarray] = []
    found = _descend(tree, tree.root, rng_, _range_bbox(rng_), stats, out,
                     c_kappa, True, tol)
    return not found, stats


def nearest_above_line(
    tree: PartitionTree,
    q: Point2,
    line: Line2,
    c_kappa: float = 4.0,
    rel_tol: float = 1e-6,
    tol: Tolerance = DEFAULT_TOL,
) -> Tuple[Optional[Tuple[int, float]], QueryStats]:
    """Closest point to q among those on the closed positive side of the line.

    Bisects the search radius using cap emptiness queries, then reports the
    final small cap and takes the argmin; ties break to the lowest index.
    The anchor q must itself lie on the positive side.
    """
    h = line.side(q)
    if h < -tol.eps_pred:
        raise MalformedInputError("query point lies below the line")
    stats = QueryStats()
    P = tree.P
    side = P.xs * line.a + P.ys * line.b - line.c
    above = np.flatnonzero(side >= -tol.eps_pred)
    if len(above) == 0:
        return None, stats

    def exists_within(d: float) -> bool:
        if d > h + tol.eps_dist:
            empty, st = query_empty(tree, CircularCap(Circle2(q, d), line),
                                    c_kappa, tol)
            stats.nodes_visited += st.nodes_visited
            stats.leaves_scanned += st.leaves_scanned
            stats.fallbacks += st.fallbacks
            stats.points_tested += st.points_tested
            return not empty
        # the whole disk is above the line; a plain distance test is exact
        stats.fallbacks += 1
        dd = np.hypot(P.xs[above] - q.x, P.ys[above] - q.y)
        return bool((dd <= d).any())

    span = math.hypot(P.xs.max() - P.xs.min(), P.ys.max() - P.ys.min())
    hi = max(span + float(np.hypot(P.xs - q.x, P.ys - q.y).max()), tol.eps_dist)
    lo = 0.0
    eps = max(rel_tol * hi, 1e-12)
    while hi - lo > eps:
        mid = 0.5 * (lo + hi)
        if exists_within(mid):
            hi = mid
        else:
            lo = mid
    dd = np.hypot(P.xs[above] - q.x, P.ys[above] - q.y)
    cand = np.flatnonzero(dd <= hi + eps)
    k = cand[int(np.argmin(dd[cand]))]
    return (int(above[k]), float(dd[k])), stats
