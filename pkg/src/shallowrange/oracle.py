"""Brute-force reference answers; every structure is checked against these."""

from __future__ import annotations

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from .cells import ElementaryCell
from .geom import DEFAULT_TOL, Line2, Point2, Tolerance
from .points import PointSet
from .ranges import CellRelation, Range, relate_cell


def brute_mask(P: PointSet, rng_: Range, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    return rng_.contains_points(P.xs, P.ys, tol)


def brute_report(P: PointSet, rng_: Range, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Sorted indices of the points inside the range."""
    return np.flatnonzero(brute_mask(P, rng_, tol)).astype(np.int64)


def brute_count(P: PointSet, rng_: Range, tol: Tolerance = DEFAULT_TOL) -> int:
    return int(brute_mask(P, rng_, tol).sum())


def brute_empty(P: PointSet, rng_: Range, tol: Tolerance = DEFAULT_TOL) -> bool:
    return not bool(brute_mask(P, rng_, tol).any())


def brute_nearest_above(
    P: PointSet, q: Point2, line: Line2, tol: Tolerance = DEFAULT_TOL
) -> Optional[Tuple[int, float]]:
    """Closest point to q on the closed positive side; ties go to the lowest index.

    Returns (index, distance) or None when no point lies above the line.
    """
    side = P.xs * line.a + P.ys * line.b - line.c
    above = np.flatnonzero(side >= -tol.eps_pred)
    if len(above) == 0:
        return None
    d = np.hypot(P.xs[above] - q.x, P.ys[above] - q.y)
    k = int(np.argmin(d))  # argmin returns the first minimum, so lowest index wins
    return int(above[k]), float(d[k])


def brute_crossing_number(rng_: Range, cells: Sequence[ElementaryCell],
                          tol: Tolerance = DEFAULT_TOL) -> int:
    """How many cells the range boundary crosses (cells counted with multiplicity)."""
    return sum(1 for c in cells if relate_cell(rng_, c, tol) == CellRelation.CROSSING)
