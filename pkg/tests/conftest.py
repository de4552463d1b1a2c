import numpy as np
import pytest

from heatlab import QuadratureConfig
from heatlab.heat_solver import RadialGrid


@pytest.fixture(scope="session")
def cfg():
    return QuadratureConfig()


@pytest.fixture(scope="session")
def grid_n1():
    return RadialGrid(1, 1e-6, 12.0, 48)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
