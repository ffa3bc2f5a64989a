import numpy as np
import pytest

from evaci.config import load_config


@pytest.fixture(scope="session")
def defaults():
    return load_config(None)


@pytest.fixture()
def gains(defaults):
    return defaults[0]


@pytest.fixture()
def constants(defaults):
    return defaults[1]


@pytest.fixture()
def scenario(defaults):
    return defaults[2]


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
