import numpy as np
import pytest

from rslab.schemas.params import ModelParams, ReducedSetSpec
from rslab.services.quadrature import default_rule
from rslab.services.scalar_theory import solve_q
from rslab.services.tap_construction import disorder_for_draw, tap_iterate

def build_state(beta, h, N, k, seed=0, index=0):
    params = ModelParams(beta=beta, h=h)
    q = solve_q(params).q
    return tap_iterate(disorder_for_draw(N, seed, index), params, q, k)

@pytest.fixture(scope="session")
def rule():
    return default_rule()

@pytest.fixture(scope="session")
def params():
    return ModelParams(beta=0.5, h=0.4)

@pytest.fixture(scope="session")
def state_factory():
    return build_state

@pytest.fixture(scope="session")
def small_state():
    """N=12, k=2 at (0.5, 0.4); small enough for pair enumeration"""
    return build_state(0.5, 0.4, 12, 2, seed=11)

@pytest.fixture(scope="session")
def small_spec():
    return ReducedSetSpec(epsilon=0.6, k=2)

@pytest.fixture(scope="session")
def medium_state():
    return build_state(0.8, 0.3, 200, 3, seed=5)

@pytest.fixture
def spin_rng():
    return np.random.default_rng(20240611)
