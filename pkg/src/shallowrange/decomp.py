"""Vertical decomposition of union complements, and weighted shallow cuttings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cells import (
    ElementaryCell,
    GLOBAL_BOX,
    SegCurve,
    VSeg,
    box_cell,
    element_intersections,
    restrict_curve,
)
from .errors import CuttingQualityError, CuttingSizeExceededError
from .geom import DEFAULT_TOL, Point2, Tolerance
from .ranges import Range, CellRelation, relate_cells


def union_complement_decompose(
    ranges: Sequence[Range],
    clip: Optional[ElementaryCell] = None,
    tol: Tolerance = DEFAULT_TOL,
) -> List[ElementaryCell]:
    """Decompose clip minus the union of the ranges into vertical pseudo-trapezoids.

    Slab sweep: cut at every boundary-element endpoint and pairwise
    intersection, classify the intervals between boundary curves at each slab
    midpoint, then merge adjacent slabs bounded by the same pair of curves.
    """
    if clip is None:
        clip = box_cell()
    if not ranges:
        return [ElementaryCell(clip.x_left, clip.x_right, clip.bottom, clip.top, 0)]

    eps = tol.eps_dist
    xl, xr = clip.x_left, clip.x_right
    clip_elems = [
        restrict_curve(clip.bottom, xl, xr),
        restrict_curve(clip.top, xl, xr),
    ]
    range_elems = []
    for rng in ranges:
        range_elems.extend(rng.boundary_elements(GLOBAL_BOX, tol))

    breakx = {xl, xr}
    for e in range_elems:
        if isinstance(e, VSeg):
            breakx.add(e.x)
        else:
            s0, s1 = e.xspan()
            breakx.update((s0, s1))
    probe_elems = range_elems + clip_elems
    for i in range(len(probe_elems)):
        for j in range(i + 1, len(probe_elems)):
            for p in element_intersections(probe_elems[i], probe_elems[j], tol):
                breakx.add(p.x)

    xs = [xl]
    for x in sorted(breakx):
        if x <= xl or x >= xr:
            continue
        if x - xs[-1] > eps:
            xs.append(x)
    if xr - xs[-1] > eps:
        xs.append(xr)
    else:
        xs[-1] = xr

    curves = [e for e in range_elems if not isinstance(e, VSeg)]

    # first pass: uncovered candidate intervals per slab
    slab_intervals: List[List[Tuple]] = []
    mid_x: List[float] = []
    mid_y: List[float] = []
    for xa, xb in zip(xs[:-1], xs[1:]):
        xm = 0.5 * (xa + xb)
        ybot = float(clip.bottom_y(xm))
        ytop = float(clip.top_y(xm))
        bounds = [(ybot, clip.bottom), (ytop, clip.top)]
        for c in curves:
            s0, s1 = c.xspan()
            if s0 - eps <= xm <= s1 + eps:
                y = float(c.y_at(xm))
                if ybot - eps < y < ytop + eps:
                    bounds.append((y, c))
        bounds.sort(key=lambda t: t[0])
        ivals = []
        for (y1, c1), (y2, c2) in zip(bounds[:-1], bounds[1:]):
            if y2 - y1 <= eps:
                continue
            ivals.append((c1, c2))
            mid_x.append(xm)
            mid_y.append(0.5 * (y1 + y2))
        slab_intervals.append(ivals)

    # second pass: batch coverage test of all interval midpoints
    if mid_x:
        px = np.array(mid_x)
        py = np.array(mid_y)
        covered = np.zeros(len(px), dtype=bool)
        for rng in ranges:
            covered |= rng.contains_points(px, py, tol)
    k = 0
    uncovered_per_slab: List[Dict[Tuple[int, int], Tuple]] = []
    for ivals in slab_intervals:
        keep = {}
        for c1, c2 in ivals:
            if not covered[k]:
                keep[(id(c1), id(c2))] = (c1, c2)
            k += 1
        uncovered_per_slab.append(keep)

    # third pass: merge adjacent slabs sharing the same bounding curve pair
    cells: List[ElementaryCell] = []
    open_cells: Dict[Tuple[int, int], Tuple[float, object, object]] = {}
    for (xa, xb), keep in zip(zip(xs[:-1], xs[1:]), uncovered_per_slab):
        for key in list(open_cells):
            if key not in keep:
                x0, c1, c2 = open_cells.pop(key)
                cells.append(ElementaryCell(x0, xa, c1, c2, len(cells)))
        for key, (c1, c2) in keep.items():
            if key not in open_cells:
                open_cells[key] = (xa, c1, c2)
    for x0, c1, c2 in open_cells.values():
        cells.append(ElementaryCell(x0, xr, c1, c2, len(cells)))
    for i, c in enumerate(cells):
        c.id = i
    return cells


def _strictly_inside(rng: Range, p: Point2, tol: Tolerance) -> bool:
    """Point strictly interior to a range (clear of its boundary by eps_dist)."""
    if not rng.contains_points(np.array([p.x]), np.array([p.y]), tol)[0]:
        return False
    for e in rng.boundary_elements(GLOBAL_BOX, tol):
        if isinstance(e, VSeg):
            if abs(p.x - e.x) <= tol.eps_dist and e.y0 - tol.eps_dist <= p.y <= e.y1 + tol.eps_dist:
                return False
        else:
            s0, s1 = e.xspan()
            if s0 - tol.eps_dist <= p.x <= s1 + tol.eps_dist:
                y = float(e.y_at(min(max(p.x, s0), s1)))
                if abs(p.y - y) <= 10.0 * tol.eps_dist:
                    return False
    return True


def union_boundary_vertices(ranges: Sequence[Range], tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of arrangement vertices lying on the boundary of the union."""
    boxes = [rng.bbox() for rng in ranges]
    elems = [rng.boundary_elements(GLOBAL_BOX, tol) for rng in ranges]
    pts: List[Tuple[int, int, Point2]] = []
    for i in range(len(ranges)):
        bi = boxes[i]
        for j in range(i + 1, len(ranges)):
            bj = boxes[j]
            if (bi.xmax < bj.xmin or bj.xmax < bi.xmin
                    or bi.ymax < bj.ymin or bj.ymax < bi.ymin):
                continue
            for ei in elems[i]:
                for ej in elems[j]:
                    for p in element_intersections(ei, ej, tol):
                        pts.append((i, j, p))
    cand: List[Tuple[int, int, Point2]] = []
    seen = set()
    for i, j, p in pts:
        key = (round(p.x, 7), round(p.y, 7))
        if key in seen:
            continue
        seen.add(key)
        cand.append((i, j, p))
    if not cand:
        return 0
    px = np.array([p.x for _, _, p in cand])
    py = np.array([p.y for _, _, p in cand])
    # closed containment first (vectorized per range); the exact strict test
    # only runs for the few ranges that pass it
    inside = np.zeros((len(ranges), len(cand)), dtype=bool)
    pad = tol.eps_dist
    for k, rng in enumerate(ranges):
        b = boxes[k]
        m = ((px >= b.xmin - pad) & (px <= b.xmax + pad)
             & (py >= b.ymin - pad) & (py <= b.ymax + pad))
        if m.any():
            hit = rng.contains_points(px[m], py[m], tol)
            inside[k, np.flatnonzero(m)[hit]] = True
    count = 0
    for idx, (i, j, p) in enumerate(cand):
        deep = False
        for k in np.flatnonzero(inside[:, idx]):
            if k == i or k == j:
                continue
            if _strictly_inside(ranges[k], p, tol):
                deep = True
                break
        if not deep:
            count += 1
    return count


@dataclass
class WeightedRanges:
    """Ranges weighted by 2^kappa, with kappa stored as exponents."""

    ranges: List[Range]
    kappa: np.ndarray  # int64 exponents

    def __post_init__(self):
        self.kappa = np.asarray(self.kappa, dtype=np.int64)
        if len(self.kappa) != len(self.ranges):
            raise ValueError("one exponent per range required")
        if (self.kappa < 0).any():
            raise ValueError("exponents must be nonnegative")

    @classmethod
    def uniform(cls, ranges: Sequence[Range]) -> "WeightedRanges":
        return cls(list(ranges), np.zeros(len(ranges), dtype=np.int64))

    def weight(self, i: int) -> int:
        return 1 << int(self.kappa[i])

    def total_weight(self, subset: Optional[Sequence[int]] = None) -> int:
        idx = range(len(self.ranges)) if subset is None else subset
        return sum(1 << int(self.kappa[i]) for i in idx)


def weighted_sample_no_replace(kappa: np.ndarray, k: int, rng: np.random.Generator,
                               subset: Optional[Sequence[int]] = None) -> List[int]:
    """k distinct indices, drawn proportionally to 2^kappa (exact integer sums)."""
    pool = list(range(len(kappa))) if subset is None else list(subset)
    k = min(k, len(pool))
    weights = [1 << int(kappa[i]) for i in pool]
    chosen: List[int] = []
    for _ in range(k):
        total = sum(weights)
        # unbiased big-int draw in [0, total)
        nbits = total.bit_length()
        while True:
            u = int.from_bytes(rng.bytes((nbits + 7) // 8), "little") >> ((nbits + 7) // 8 * 8 - nbits)
            if u < total:
                break
        acc = 0
        for pos, w in enumerate(weights):
            acc += w
            if u < acc:
                break
        chosen.append(pool[pos])
        del pool[pos]
        del weights[pos]
    return chosen


@dataclass
class Cutting:
    """Cells covering the complement of the union of the sampled ranges."""

    cells: List[ElementaryCell]
    crossing_lists: List[List[int]]
    uncovered_witnesses: List[int]
    stats: dict = field(default_factory=dict)


def _crossing_lists_for(wr: WeightedRanges, cells: List[ElementaryCell],
                        candidates: Sequence[int], tol: Tolerance) -> List[List[int]]:
    out: List[List[int]] = [[] for _ in cells]
    for i in candidates:
        rel = relate_cells(wr.ranges[i], cells, tol)
        for j in np.flatnonzero(rel == CellRelation.CROSSING):
            out[j].append(i)
    return out


def shallow_cutting(
    wr: WeightedRanges,
    r: float,
    clip: Optional[ElementaryCell] = None,
    seed: int = 0,
    c_s: float = 4.0,
    max_rounds: int = 6,
    cell_budget: Optional[int] = None,
    tol: Tolerance = DEFAULT_TOL,
) -> Cutting:
    """Weighted (1/r)-cutting of the complement, with per-cell refinement.

    Sample ~c_s*r ranges weight-proportionally, decompose the complement of
    their union, then refine every cell whose crossing weight exceeds W/r by
    decomposing a fresh sample of its crossing ranges inside the cell.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if not wr.ranges:
        raise ValueError("need at least one weighted range")
    if clip is None:
        clip = box_cell()
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF]))
    W = wr.total_weight()

    k = math.ceil(c_s * r)
    sample = weighted_sample_no_replace(wr.kappa, k, rng)
    witnesses = list(sample)
    cells = union_complement_decompose([wr.ranges[i] for i in sample], clip, tol)
    all_idx = list(range(len(wr.ranges)))
    crossing = _crossing_lists_for(wr, cells, all_idx, tol)
    initial_cells = len(cells)

    rounds_used = 0
    for _ in range(max_rounds):
        xi = [wr.total_weight(cl) * r / W for cl in crossing]
        bad = [j for j, x in enumerate(xi) if x > 1.0 + 1e-9]
        if not bad:
            break
        rounds_used += 1
        new_cells: List[ElementaryCell] = []
        new_crossing: List[List[int]] = []
        for j, cell in enumerate(cells):
            if j not in bad:
                new_cells.append(cell)
                new_crossing.append(crossing[j])
                continue
            q = math.ceil(c_s * xi[j] * math.log2(xi[j] + 1.0))
            sub = weighted_sample_no_replace(wr.kappa, q, rng, subset=crossing[j])
            witnesses.extend(sub)
            subcells = union_complement_decompose([wr.ranges[i] for i in sub], cell, tol)
            sub_crossing = _crossing_lists_for(wr, subcells, crossing[j], tol)
            if (len(subcells) == 1 and sub_crossing[0] == crossing[j]
                    and cell.x_right - cell.x_left > 1e-9):
                # grazing boundaries can survive resampling unchanged; force
                # a vertical split so refinement always makes progress
                xm = 0.5 * (cell.x_left + cell.x_right)
                subcells = [
                    ElementaryCell(cell.x_left, xm,
                                   restrict_curve(cell.bottom, cell.x_left, xm),
                                   restrict_curve(cell.top, cell.x_left, xm)),
                    ElementaryCell(xm, cell.x_right,
                                   restrict_curve(cell.bottom, xm, cell.x_right),
                                   restrict_curve(cell.top, xm, cell.x_right)),
                ]
                sub_crossing = _crossing_lists_for(wr, subcells, crossing[j], tol)
            new_cells.extend(subcells)
            new_crossing.extend(sub_crossing)
        cells, crossing = new_cells, new_crossing
        if cell_budget is not None and len(cells) > cell_budget:
            raise CuttingSizeExceededError(
                f"{len(cells)} cells exceed budget {cell_budget} after {rounds_used} rounds"
            )

    xi = [wr.total_weight(cl) * r / W for cl in crossing]
    if any(x > 1.0 + 1e-9 for x in xi):
        raise CuttingQualityError(
            f"crossing weight ratio still {max(xi):.3g} > 1 after {max_rounds} rounds"
        )
    if cell_budget is not None and len(cells) > cell_budget:
        raise CuttingSizeExceededError(f"{len(cells)} cells exceed budget {cell_budget}")

    for i, c in enumerate(cells):
        c.id = i
    witnesses = sorted(set(witnesses))
    stats = {
        "rounds_used": rounds_used,
        "initial_cells": initial_cells,
        "final_cells": len(cells),
        "growth": len(cells) / max(initial_cells, 1),
        "sample_size": k,
    }
    return Cutting(cells, crossing, witnesses, stats)
