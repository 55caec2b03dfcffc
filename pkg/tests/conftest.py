import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fracheat.grid import GridSpec

settings.register_profile(
    "default",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def line():
    return GridSpec(1, 64, 2 * np.pi)


@pytest.fixture
def plane():
    return GridSpec(2, 32, 2 * np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
