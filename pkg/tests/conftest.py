import math

import numpy as np
import pytest

from corot2d import make_grid
from corot2d.fields import project_state
from corot2d.randfields import random_state


@pytest.fixture(scope="session")
def grid32():
    return make_grid(2 * math.pi, 2 * math.pi, 32, 32)


@pytest.fixture(scope="session")
def grid16():
    return make_grid(2 * math.pi, 2 * math.pi, 16, 16)


@pytest.fixture(scope="session")
def grid_aniso():
    return make_grid(2 * math.pi, math.pi, 16, 32)


def make_random_state(grid, seed=0, amp_v=0.4, amp_s=0.4, trace_free=True):
    return project_state(grid, random_state(
        grid, seed, amp_v=amp_v, amp_s=amp_s, trace_free=trace_free))


def rel_err(a, b):
    denom = max(abs(b), 1e-300)
    return abs(a - b) / denom


def max_rel_field_err(got: np.ndarray, want: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(want))), 1e-300)
    return float(np.max(np.abs(got - want))) / scale
