"""Random samples with shallow-net and (nu, alpha)-sample guarantees.

Natural logarithms throughout; sizing constants are explicit parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geom import DEFAULT_TOL, Tolerance
from .points import PointSet
from .ranges import Range

#: VC-dimension surrogates: triangles are cut out by 3 lines of 2 dof each,
#: caps by a circle (3 dof) plus a chord line.
DELTA_VC_TRIANGLE = 6.0
DELTA_VC_CAP = 4.0


def shallow_net_size(r: float, q: float, a: float = 1.0, delta_vc: float = DELTA_VC_TRIANGLE) -> int:
    """Sample size giving the shallow-net guarantee with probability >= 1-q."""
    eps = 1.0 / r
    return math.ceil((a / eps) * (delta_vc * math.log(1.0 / eps) + math.log(1.0 / q)))


@dataclass
class ShallowNet:
    sample: np.ndarray  # indices into P, without repetition
    eps: float
    q: float
    a: float
    c: float
    delta_vc: float

    def __len__(self):
        return len(self.sample)


def draw_shallow_net(
    P: PointSet,
    r: float,
    q: float = 0.5,
    a: float = 1.0,
    delta_vc: float = DELTA_VC_TRIANGLE,
    seed: int = 0,
    c: float = 4.0,
) -> ShallowNet:
    """Uniform sample (without replacement) sized for the shallow-net guarantee."""
    if not (1 <= r):
        raise ValueError("need r >= 1")
    if not (0.0 < q < 1.0):
        raise ValueError("need 0 < q < 1")
    size = min(len(P), shallow_net_size(r, q, a, delta_vc))
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF]))
    sample = np.sort(rng.choice(len(P), size=size, replace=False)) if size else np.array([], dtype=np.int64)
    return ShallowNet(sample.astype(np.int64), 1.0 / r, q, a, c, delta_vc)


def _count_in(rng_: Range, xs, ys, tol: Tolerance) -> int:
    if len(xs) == 0:
        return 0
    return int(rng_.contains_points(xs, ys, tol).sum())


def verify_shallow_net(
    P: PointSet,
    N: ShallowNet,
    probes: Sequence[Range],
    c: Optional[float] = None,
    t_values: Sequence[int] = (0, 1, 2, 4, 8),
    tol: Tolerance = DEFAULT_TOL,
) -> dict:
    """Check both shallow-net implications on the given probe ranges.

    (i)  |N cap R| <= t*ln(1/eps)  implies  |P cap R| <= c*(t+1)*eps*|P|
    (ii) |P cap R| <= t*eps*|P|    implies  |N cap R| <= c*(t+1)*ln(1/eps)
    """
    if not probes:
        raise ValueError("need at least one probe range")
    if c is None:
        c = N.c
    n = len(P)
    log_inv_eps = math.log(1.0 / N.eps) if N.eps < 1.0 else 0.0
    nxs, nys = P.xs[N.sample], P.ys[N.sample]
    violations_i = 0
    violations_ii = 0
    checks = 0
    for R in probes:
        n_r = _count_in(R, nxs, nys, tol)
        x_r = _count_in(R, P.xs, P.ys, tol)
        for t in t_values:
            checks += 1
            if n_r <= t * log_inv_eps and not x_r <= c * (t + 1) * N.eps * n:
                violations_i += 1
            if x_r <= t * N.eps * n and not n_r <= c * (t + 1) * log_inv_eps:
                violations_ii += 1
    return {"violations_i": violations_i, "violations_ii": violations_ii, "checks": checks}


def d_nu(r: float, s: float, nu: float) -> float:
    """Distance d_nu(r, s) = |r - s| / (r + s + nu)."""
    return abs(r - s) / (r + s + nu)


def nu_alpha_sample_size(nu: float, alpha: float, q: float, a: float = 1.0,
                         delta_vc: float = DELTA_VC_TRIANGLE) -> int:
    return math.ceil((a / (alpha * alpha * nu)) * (delta_vc * math.log(1.0 / nu) + math.log(1.0 / q)))


def draw_nu_alpha_sample(
    P: PointSet,
    nu: float,
    alpha: float,
    q: float,
    a: float = 1.0,
    delta_vc: float = DELTA_VC_TRIANGLE,
    seed: int = 0,
) -> np.ndarray:
    """Uniform sample sized for the (nu, alpha)-sample guarantee; returns indices."""
    # nu = 1 is allowed: the log term just vanishes
    if not (0.0 < nu <= 1.0):
        raise ValueError("need 0 < nu <= 1")
    for name, v in (("alpha", alpha), ("q", q)):
        if not (0.0 < v < 1.0):
            raise ValueError(f"need 0 < {name} < 1")
    size = min(len(P), nu_alpha_sample_size(nu, alpha, q, a, delta_vc))
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF]))
    if size == 0:
        return np.array([], dtype=np.int64)
    return np.sort(rng.choice(len(P), size=size, replace=False)).astype(np.int64)
