import numpy as np
import pytest

from sirfield import Grid, Kernel, Params, initial_state, product_rule


@pytest.fixture
def unit_grid():
    """20x20 grid on the unit square."""
    return Grid(20, 20, 1.0 / 19.0, 1.0 / 19.0)


@pytest.fixture
def default_params():
    return Params(a=100.0, b=0.1, c=0.01, delta=0.05)


@pytest.fixture
def default_kernel():
    return Kernel(alpha=0.0, beta=1.0)


@pytest.fixture
def small_rule():
    return product_rule(10, 0.05)


@pytest.fixture
def start_state(unit_grid):
    return initial_state(unit_grid)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
