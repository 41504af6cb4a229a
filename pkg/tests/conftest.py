import numpy as np
import pytest

from tandemtail.distributions import Deterministic, Exponential, Gamma
from tandemtail.polyexp_bounds import fit_gim_mm

MU = 1.0


@pytest.fixture
def dm_arrivals():
    """Constant inter-arrival times 1 / (rho mu)."""

    def make(rho: float, mu: float = MU):
        return Deterministic(1.0 / (rho * mu))

    return make


@pytest.fixture
def erlang_arrivals():
    """Erlang-2 inter-arrival times of mean 1 / (rho mu)."""

    def make(rho: float, mu: float = MU):
        return Gamma(2.0, 2.0 * rho * mu)

    return make


@pytest.fixture(scope="session")
def dm_params():
    return fit_gim_mm(Deterministic(2.0), MU)


@pytest.fixture
def service():
    return Exponential(MU)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
