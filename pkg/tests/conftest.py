import numpy as np
import pytest


@pytest.fixture
def rand_image():
    """Independent test-input generator (not the package Rng)."""

    def make(seed, shape=(3, 16, 16), scale=1.0, offset=0.0):
        g = np.random.default_rng(seed)
        return offset + scale * g.standard_normal(shape)

    return make
