import numpy as np
import pytest

from cosmoforge.raster import Raster


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_raster(rng, w=None, h=None, max_side=64):
    w = w or int(rng.integers(1, max_side + 1))
    h = h or int(rng.integers(1, max_side + 1))
    return Raster(rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))
