import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from curvlie import build_so3, build_so4

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def so3():
    return build_so3()


@pytest.fixture(scope="session")
def so4():
    return build_so4()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_symmetric(rng, n, scale=1.0):
    A = rng.standard_normal((n, n)) * scale
    return 0.5 * (A + A.T)


def random_spd(rng, n, floor=0.3):
    A = rng.standard_normal((n, n))
    return A @ A.T / n + floor * np.eye(n)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)
