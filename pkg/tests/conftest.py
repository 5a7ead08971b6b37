import numpy as np
import pytest

from vdwbem import GOLD, MeshResolution, make_frequency_grid, make_sphere


@pytest.fixture(scope="session")
def grid48():
    return make_frequency_grid(9.0, 48)


@pytest.fixture(scope="session")
def gold():
    return GOLD


@pytest.fixture(scope="session")
def sphere_res6():
    return make_sphere(1.0, MeshResolution(6))


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
