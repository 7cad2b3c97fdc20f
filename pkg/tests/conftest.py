import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from shadow_cover import cat_map, make_perturbed_system, ph3_map
from shadow_cover.systems import CAT

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

LAMBDA_CAT = (3 - np.sqrt(5)) / 2
MU_CAT = (3 + np.sqrt(5)) / 2


@pytest.fixture(scope="session")
def cat():
    return cat_map()


@pytest.fixture(scope="session")
def ph3():
    return ph3_map()


@pytest.fixture(scope="session")
def perturbed():
    return make_perturbed_system(CAT, 0.01)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
