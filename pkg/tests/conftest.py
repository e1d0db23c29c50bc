import numpy as np
import pytest

from darkwave import Grid


def soliton_profile(grid: Grid, c: float) -> np.ndarray:
    """Closed-form dark-soliton profile of the local (Dirac) problem."""
    amp = (2.0 - c * c) / 2.0
    b = np.sqrt(2.0 - c * c) / 2.0
    return amp / np.cosh(b * grid.nodes) ** 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
