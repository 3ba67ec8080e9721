import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from moufang.catalog import builtin, cml81

settings.register_profile(
    "loops", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("loops")

# commutative loop of order 6 that is not Moufang (found by exhaustive search)
NON_MOUFANG_6 = [
    [0, 1, 2, 3, 4, 5],
    [1, 0, 3, 2, 5, 4],
    [2, 3, 4, 5, 0, 1],
    [3, 2, 5, 4, 1, 0],
    [4, 5, 0, 1, 3, 2],
    [5, 4, 1, 0, 2, 3],
]

# noncommutative nonassociative loop of order 5
NONCOMMUTATIVE_5 = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 3, 4, 0, 1],
    [3, 4, 1, 2, 0],
    [4, 2, 0, 1, 3],
]


@pytest.fixture(scope="session")
def C81():
    return cml81()


@pytest.fixture(scope="session")
def Z9():
    return builtin("cyclic:9")


@pytest.fixture(scope="session")
def Z9xC81():
    return builtin("cyclic:9*cml81")


@pytest.fixture(scope="session")
def Z2xC81():
    return builtin("cyclic:2*cml81")


@pytest.fixture
def rng():
    return np.random.default_rng(0xC3)
