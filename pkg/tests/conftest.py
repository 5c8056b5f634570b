import numpy as np
import pytest

from framevol.frames import mercedes_frame


@pytest.fixture
def mercedes():
    return mercedes_frame()


@pytest.fixture
def rng():
    return np.random.default_rng(20240)
