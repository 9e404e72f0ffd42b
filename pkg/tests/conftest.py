import pytest

from nlheat import ProblemParams, RadialGrid, solve_ground_profile
from nlheat.exponents import critical_exponents
from nlheat.linearize import kernel_from_steady


@pytest.fixture(scope="session")
def params13():
    return ProblemParams(13, 3.0)


@pytest.fixture(scope="session")
def params_pc11():
    return ProblemParams(11, float(critical_exponents(11).pc))


@pytest.fixture(scope="session")
def grid_full():
    return RadialGrid.make()


@pytest.fixture(scope="session")
def grid_small():
    # cheap grid for evolution tests; same layout, shorter domain
    return RadialGrid.make(rmax=200.0, core_nodes=121, tail_nodes=500)


@pytest.fixture(scope="session")
def sol13(params13, grid_full):
    return solve_ground_profile(params13, grid_full)


@pytest.fixture(scope="session")
def sol13_small(params13, grid_small):
    return solve_ground_profile(params13, grid_small)


@pytest.fixture(scope="session")
def kernel13(sol13):
    return kernel_from_steady(sol13)
