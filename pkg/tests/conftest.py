import numpy as np
import pytest
from hypothesis import settings

from cgolab.grid import GridSpec

settings.register_profile("cgolab", max_examples=25, deadline=None)
settings.load_profile("cgolab")


@pytest.fixture(scope="session")
def grid():
    return GridSpec()


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(n_space=32, n_time=33)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rel(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(np.asarray(b)))
