import numpy as np
import pytest

from oscflux import OscillatorPairParams, build_system


# Reference rates used throughout: gamma2 = 2 * gamma1 = 2e-3, so the
# eigenvalue-coalescence coupling is 5e-4 and the flow-splitting coupling
# is sqrt(2.5e-6) ~ 1.5811e-3.
G1, G2 = 1e-3, 2e-3


@pytest.fixture
def equal_temp_params():
    return OscillatorPairParams(G1, G2, 1e-3, 1.0, 1.0)


@pytest.fixture
def hot_cold_params():
    return OscillatorPairParams(G1, G2, 1.3e-3, 0.0, 1.0)


def random_params(rng: np.random.Generator, allow_zero_coupling=True):
    g1, g2 = 10.0 ** rng.uniform(-4, -1, size=2)
    cr = np.sqrt(0.5 * (g1 * g1 + g2 * g2))
    om = rng.uniform(0.0 if allow_zero_coupling else 0.05, 5.0) * cr
    t1, t2 = rng.uniform(0.0, 5.0, size=2)
    if t1 + t2 == 0.0:
        t2 = 1.0
    return OscillatorPairParams(g1, g2, om, t1, t2)


def system_of(params):
    return build_system(params)
