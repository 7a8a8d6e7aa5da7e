import numpy as np
import pytest
from hypothesis import settings

from rigidlid.spectral import Grid

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid():
    return Grid()


@pytest.fixture(scope="session")
def small_grid():
    return Grid(-50.0, 50.0, 256)


def bump(x, width=2.0):
    return np.exp(-((x / width) ** 2))
