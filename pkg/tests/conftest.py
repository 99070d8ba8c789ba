import numpy as np
import pytest

from perctree import harness


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=False)
def fresh_caches():
    harness.clear_caches()
    yield
    harness.clear_caches()
