"""Pure-python (numpy) implementations of the hot point-classification kernels.

Semantics must match shallowrange._ckernels exactly; the benchmark suite and
test_kernels compare the two implementations element for element.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

# Shewchuk's filter constant for the 2d orientation determinant:
# (3 + 16*eps) * eps with eps = 2**-53.
_CCW_ERRBOUND_A = (3.0 + 16.0 * 2.0**-53) * 2.0**-53


def orient_det(ax, ay, bx, by, px, py):
    """Determinant of (b-a, p-a) per point, plus its floating error bound.

    Points with |det| <= errbound have an uncertain sign and must be
    re-evaluated exactly by the caller.
    """
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    detleft = (bx - ax) * (py - ay)
    detright = (by - ay) * (px - ax)
    det = detleft - detright
    errbound = _CCW_ERRBOUND_A * (np.abs(detleft) + np.abs(detright))
    return det, errbound


def halfplane_mask(px, py, a, b, c, eps):
    """Closed membership in {a*x + b*y >= c}, with eps slack on the boundary."""
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    return a * px + b * py - c >= -eps


def disk_mask(px, py, cx, cy, r, eps):
    """Closed membership in the disk of center (cx, cy) and radius r."""
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    dx = px - cx
    dy = py - cy
    rr = r + eps
    return dx * dx + dy * dy <= rr * rr
