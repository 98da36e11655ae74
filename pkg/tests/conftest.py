import numpy as np
import pytest

from homwalk import Grid, SpinorField


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_field(rng: np.random.Generator, grid: Grid) -> SpinorField:
    shape = (grid.n_sites,)
    up = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    down = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return SpinorField(grid, up, down)
