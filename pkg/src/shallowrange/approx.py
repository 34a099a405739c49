"""Relative-error approximate counting from emptiness probes on random subsets.

A subset of size s drawn with replacement misses all m matching points with
probability (1 - m/n)^s, so the empty fraction over many subsets pins down m.
Subset sizes are organized in geometric levels; a majority-vote binary search
locates the right level and the empty fraction there is inverted for the
estimate.  The deflation by (1 - delta/2) biases the answer into [(1-delta)m, m].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .geom import DEFAULT_TOL, Tolerance
from .points import PointSet
from .ranges import Range


@dataclass
class ApproxParams:
    delta: float = 0.25
    c_a: float = 6.0      # scales the number of subsets per level
    c_g: float = 1.0      # scales subset sizes
    search_reps: int = 64  # subsets used per level during the binary search


class ApproxCounter:
    """Counting structure over a fixed point set.

    Per-level subsets are regenerated from stored seeds on demand and cached,
    so the persistent footprint is the seed table plus a few live levels.
    """

    def __init__(self, P: PointSet, params: Optional[ApproxParams] = None, seed: int = 0):
        self.P = P
        self.params = params or ApproxParams()
        self.seed = seed
        n = max(len(P), 2)
        delta = self.params.delta
        if not (0.0 < delta < 1.0):
            raise ValueError("need 0 < delta < 1")
        self.reps = max(8, math.ceil(self.params.c_a * math.log(n) / (delta * delta)))
        # level j targets m_j matching points; subset size r_j ~ c_g * n / m_j
        self.level_m = []
        m = 0.25
        while m <= n:
            self.level_m.append(m)
            m *= 1.0 + delta
        self.level_r = [max(1, math.ceil(self.params.c_g * n / mj)) for mj in self.level_m]
        self._cache: Dict[int, np.ndarray] = {}
        self._cache_order: list = []

    def storage_bytes(self) -> int:
        return sum(a.nbytes for a in self._cache.values()) + 16 * len(self.level_m)

    def _subsets(self, level: int) -> np.ndarray:
        got = self._cache.get(level)
        if got is not None:
            return got
        rng = np.random.default_rng(np.random.SeedSequence(
            [self.seed & 0xFFFFFFFF, level]))
        idx = rng.integers(0, len(self.P), size=(self.reps, self.level_r[level]))
        self._cache[level] = idx
        self._cache_order.append(level)
        while len(self._cache_order) > 6:
            self._cache.pop(self._cache_order.pop(0), None)
        return idx

    def _empty_fraction(self, mask: np.ndarray, level: int, reps: Optional[int] = None) -> float:
        idx = self._subsets(level)
        if reps is not None:
            idx = idx[:reps]
        return float((~mask[idx].any(axis=1)).mean())

    def count(self, rng_: Range, tol: Tolerance = DEFAULT_TOL) -> Tuple[int, dict]:
        """Estimate t with (1-delta)*m <= t <= m (w.h.p.) and t = 0 iff m = 0."""
        n = len(self.P)
        mask = rng_.contains_points(self.P.xs, self.P.ys, tol)
        stats = {"levels": len(self.level_m), "reps": self.reps, "probes": 0}
        if not mask.any():
            return 0, stats

        s_reps = min(self.params.search_reps, self.reps)
        lo, hi = 0, len(self.level_m) - 1
        # empty fraction increases with the level; find the crossover
        while lo < hi:
            mid = (lo + hi) // 2
            stats["probes"] += s_reps
            if self._empty_fraction(mask, mid, s_reps) >= 0.5:
                hi = mid
            else:
                lo = mid + 1
        level = lo
        # invert at a level whose empty fraction is comfortably interior
        p_hat = self._empty_fraction(mask, level)
        stats["probes"] += self.reps
        steps = 0
        while p_hat >= 0.9 and level > 0 and steps < 8:
            level -= 1
            p_hat = self._empty_fraction(mask, level)
            stats["probes"] += self.reps
            steps += 1
        while p_hat <= 0.1 and level < len(self.level_m) - 1 and steps < 16:
            level += 1
            p_hat = self._empty_fraction(mask, level)
            stats["probes"] += self.reps
            steps += 1
        r = self.level_r[level]
        if p_hat <= 0.0:
            m_hat = float(n)
        elif p_hat >= 1.0:
            m_hat = 1.0
        else:
            m_hat = n * (1.0 - p_hat ** (1.0 / r))
        t = int(max(1, min(n, math.floor((1.0 - self.params.delta / 2.0) * m_hat + 0.5))))
        stats.update({"level": level, "subset_size": r, "empty_fraction": p_hat,
                      "m_hat": m_hat, "storage_bytes": self.storage_bytes()})
        return t, stats
