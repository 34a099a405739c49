import math

import numpy as np
import pytest

from shallowrange.gen import random_points
from shallowrange.points import PointSet

ALPHA = math.pi / 6  # 30 degrees
BETA = math.pi  # at least a semidisk


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_points():
    return random_points(256, "uniform", seed=17)


@pytest.fixture
def tiny_points():
    xs = np.array([0.1, 0.9, 0.5, 0.3, 0.7])
    ys = np.array([0.1, 0.2, 0.8, 0.6, 0.4])
    return PointSet(xs, ys)
