from pathlib import Path

import numpy as np
import pytest

from app.services.markov_service import MarkovService
from app.services.spectral_service import SpectralService

FIXTURES = Path(__file__).parent / "fixtures"

TWO_STATE_Q = [[-1.0, 1.0], [2.0, -2.0]]
CYCLE_Q = [[-1.0, 1.0, 0.0], [0.0, -1.0, 1.0], [1.0, 0.0, -1.0]]
BIRTH_DEATH_Q = [[-1.0, 1.0, 0.0], [1.0, -2.0, 1.0], [0.0, 2.0, -2.0]]


def make_model(q, f, nu=None, seed=None):
    return MarkovService.build_model(MarkovService.validate_q_matrix(q), f, nu, seed=seed)


def random_model(rng: np.random.Generator, n: int, reversible: bool = False, nu=None):
    """
    Modelo aleatorio denso (por lo tanto irreducible) con f centrado.
    Con reversible=True las tasas son q_xy = w_xy / π_x con w simétrica.
    """
    if reversible:
        target = rng.uniform(0.5, 2.0, n)
        target /= target.sum()
        w = rng.uniform(0.1, 1.0, (n, n))
        w = (w + w.T) / 2.0
        rates = w / target[:, None]
    else:
        rates = rng.uniform(0.1, 2.0, (n, n))
    np.fill_diagonal(rates, 0.0)
    np.fill_diagonal(rates, -rates.sum(axis=1))
    return make_model(rates, rng.standard_normal(n), nu)


def random_models(count: int, seed: int = 0, sizes=(2, 3, 4, 5, 6), reversible: bool = False):
    rng = np.random.default_rng(seed)
    return [random_model(rng, int(rng.choice(sizes)), reversible) for _ in range(count)]


@pytest.fixture
def two_state():
    return make_model(TWO_STATE_Q, [1.0, -2.0])


@pytest.fixture
def two_state_stationary():
    return make_model(TWO_STATE_Q, [1.0, -2.0], nu=[2.0 / 3.0, 1.0 / 3.0])


@pytest.fixture
def cycle():
    return make_model(CYCLE_Q, [1.0, 0.0, -1.0])


@pytest.fixture
def birth_death():
    return make_model(BIRTH_DEATH_Q, [1.0, 0.0, -2.0], nu=[0.4, 0.4, 0.2])


@pytest.fixture
def spectral():
    def decompose(model):
        return SpectralService.spectral_decomposition(model.q, model.pi)
    return decompose


@pytest.fixture
def fixture_path():
    def path(name: str) -> Path:
        return FIXTURES / name
    return path
