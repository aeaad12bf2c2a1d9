import numpy as np
import pytest

from fppsla.verify import random_instance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def instance(rng):
    """(config, channels, W, Theta, F, alpha, beta, mats) at N=4, K=3, L=4."""
    return random_instance(4, 3, 4, rng)


def cgauss(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
