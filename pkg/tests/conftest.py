import numpy as np
import pytest

from tsmatpi.bath import BathConfig, compute_eta, discretize_bath
from tsmatpi.influence import SystemParams, system_propagator

DT = 0.1


def make_setup(xi=0.2, n_modes=40, max_lag=12, epsilon=1.0, delta=1.0, dt=DT, beta=5.0):
    cfg = BathConfig(xi=xi, omega_c=2.5, omega_max=10.0, n_modes=n_modes, beta=beta)
    eta = compute_eta(discretize_bath(cfg), beta, dt, max_lag)
    return eta, system_propagator(SystemParams(epsilon, delta), dt)


@pytest.fixture(scope="session")
def std_bath():
    """Default parameters at L = 40: ``(eta, K)``."""
    return make_setup()


@pytest.fixture(scope="session")
def decoupled():
    return make_setup(xi=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
