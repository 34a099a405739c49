"""Random instance generators: point clouds and admissible query ranges."""

from __future__ import annotations

import math

import numpy as np

from .geom import Circle2, Line2, Point2
from .points import PointSet
from .ranges import CircularCap, FatTriangle


def random_points(n: int, distribution: str = "uniform", seed: int = 0) -> PointSet:
    """n points in [0, 1]^2: uniform, gaussian blob, or clustered."""
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF]))
    if distribution == "uniform":
        xs = rng.uniform(0.0, 1.0, n)
        ys = rng.uniform(0.0, 1.0, n)
    elif distribution == "gaussian":
        xs = np.clip(rng.normal(0.5, 0.15, n), 0.0, 1.0)
        ys = np.clip(rng.normal(0.5, 0.15, n), 0.0, 1.0)
    elif distribution == "clustered":
        k = max(1, n // 200)
        centers = rng.uniform(0.15, 0.85, (k, 2))
        which = rng.integers(0, k, n)
        xs = np.clip(centers[which, 0] + rng.normal(0, 0.03, n), 0.0, 1.0)
        ys = np.clip(centers[which, 1] + rng.normal(0, 0.03, n), 0.0, 1.0)
    else:
        raise ValueError(f"unknown distribution {distribution!r}")
    return PointSet(xs, ys)


def random_fat_triangle(rng: np.random.Generator, alpha: float,
                        center_lo: float = 0.1, center_hi: float = 0.9,
                        radius_lo: float = 0.02, radius_hi: float = 0.35) -> FatTriangle:
    """Triangle with every interior angle >= alpha, inscribed in a random circle.

    Inscribed angles are half the opposite arcs, so arcs >= 2*alpha suffice.
    """
    if not (0.0 < alpha < 2.0 * math.pi / 3.0):
        raise ValueError("alpha must be in (0, 2*pi/3)")
    slack = 2.0 * math.pi - 3.0 * (2.0 * alpha)
    parts = rng.dirichlet(np.ones(3)) * slack
    arcs = 2.0 * alpha + parts
    base = rng.uniform(0.0, 2.0 * math.pi)
    angles = base + np.concatenate([[0.0], np.cumsum(arcs[:2])])
    cx, cy = rng.uniform(center_lo, center_hi, 2)
    R = rng.uniform(radius_lo, radius_hi)
    verts = tuple(Point2(cx + R * math.cos(a), cy + R * math.sin(a)) for a in angles)
    return FatTriangle(verts)


def random_cap(rng: np.random.Generator, beta_min: float = math.pi,
               center_lo: float = 0.1, center_hi: float = 0.9,
               radius_lo: float = 0.03, radius_hi: float = 0.35) -> CircularCap:
    """Cap with central angle >= beta_min (>= semidisk by default)."""
    cx, cy = rng.uniform(center_lo, center_hi, 2)
    rho = rng.uniform(radius_lo, radius_hi)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    # central angle = 2*arccos(-s/rho) >= beta_min  <=>  s >= -rho*cos(beta_min/2)
    s_lo = -rho * math.cos(beta_min / 2.0) + 1e-9
    s = rng.uniform(max(s_lo, -0.9 * rho), 0.9 * rho)
    a, b = math.cos(theta), math.sin(theta)
    chord = Line2(a, b, a * cx + b * cy - s)
    return CircularCap(Circle2(Point2(cx, cy), rho), chord)


def random_nearest_query(rng: np.random.Generator):
    """(q, line) with q in the closed positive side of the line."""
    theta = rng.uniform(0.0, 2.0 * math.pi)
    a, b = math.cos(theta), math.sin(theta)
    px, py = rng.uniform(0.1, 0.9, 2)
    line = Line2(a, b, a * px + b * py)
    h = rng.uniform(0.0, 0.4)
    q = Point2(px + h * a, py + h * b)
    return q, line
