"""Input point sets, kept as parallel coordinate arrays."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MalformedInputError
from .geom import Point2, UnitSquareTransform


@dataclass
class PointSet:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        self.xs = np.ascontiguousarray(self.xs, dtype=np.float64)
        self.ys = np.ascontiguousarray(self.ys, dtype=np.float64)
        if self.xs.shape != self.ys.shape or self.xs.ndim != 1:
            raise MalformedInputError("coordinate arrays must be 1-d and equal length")
        if not (np.isfinite(self.xs).all() and np.isfinite(self.ys).all()):
            raise MalformedInputError("point coordinates must be finite")

    def __len__(self) -> int:
        return len(self.xs)

    def point(self, i: int) -> Point2:
        return Point2(float(self.xs[i]), float(self.ys[i]))

    def take(self, indices) -> "PointSet":
        idx = np.asarray(indices, dtype=np.int64)
        return PointSet(self.xs[idx], self.ys[idx])

    @classmethod
    def from_points(cls, pts: Sequence[Point2]) -> "PointSet":
        return cls(np.array([p.x for p in pts]), np.array([p.y for p in pts]))

    def normalized(self):
        """Rescale into [0, 1]^2; returns (new point set, transform)."""
        tr = UnitSquareTransform.fit(self.xs, self.ys)
        xs, ys = tr.apply(self.xs, self.ys)
        return PointSet(xs, ys), tr
