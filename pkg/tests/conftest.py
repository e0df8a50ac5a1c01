import numpy as np
import pytest

from sairs_switch import EpidemicParams, Gamma, SemiMarkovSpec
from sairs_switch.cases import CASES

SWAP2 = np.array([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def swap2():
    return SWAP2.copy()


@pytest.fixture
def case_1a():
    return CASES["1a"]


@pytest.fixture
def case_1b():
    return CASES["1b"]


@pytest.fixture
def case_2():
    return CASES["2"]


@pytest.fixture
def case_3a():
    return CASES["3a"]


@pytest.fixture
def case_3b():
    return CASES["3b"]


@pytest.fixture
def case_3c():
    return CASES["3c"]


@pytest.fixture
def fig1_spec_a():
    return SemiMarkovSpec(SWAP2, (Gamma(6.0, 0.8), Gamma(12.0, 0.8)))


def random_params(rng, n_regimes=2, equal_rates=False) -> EpidemicParams:
    """Admissible random rates; transmission in [0, 2], recovery in (0, 1]."""
    beta_A = tuple(rng.uniform(0.0, 2.0, n_regimes))
    if equal_rates:
        beta_I = beta_A
        delta_A = delta_I = rng.uniform(0.01, 1.0)
    else:
        beta_I = tuple(rng.uniform(0.0, 2.0, n_regimes))
        delta_A = rng.uniform(0.01, 1.0)
        delta_I = rng.uniform(0.01, 1.0)
    return EpidemicParams(
        beta_A=beta_A,
        beta_I=beta_I,
        delta_A=delta_A,
        delta_I=delta_I,
        alpha=rng.uniform(0.05, 1.0),
        gamma=rng.uniform(0.0, 0.5),
        nu=rng.uniform(0.0, 0.5),
        mu=rng.uniform(1e-5, 0.1),
    )


def random_interior_point(rng):
    """Strictly interior point of the invariant set."""
    x = rng.dirichlet((1.0, 1.0, 1.0, 1.0))[:3]
    return np.clip(x, 1e-3, None) / max(1.0 + 1e-6, x.sum() + 3e-3)
