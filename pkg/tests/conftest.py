from __future__ import annotations

import numpy as np
import pytest

from qubofolio.portfolio import build_qubo, load_instance
from qubofolio.qubo import QuboProblem


def random_problem(rng, n, scale=1.0, density=1.0):
    A = rng.normal(scale=scale, size=(n, n))
    if density < 1.0:
        A *= rng.random((n, n)) < density
    A = 0.5 * (A + A.T)
    return QuboProblem(A, rng.normal(scale=scale, size=n), float(rng.normal()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240229)


@pytest.fixture(scope="session")
def toy_spec():
    return load_instance("toy")


@pytest.fixture(scope="session")
def toy_problem(toy_spec):
    return build_qubo(toy_spec)


@pytest.fixture(scope="session")
def testing_spec():
    return load_instance("testing")


@pytest.fixture(scope="session")
def practical_spec():
    return load_instance("practical")
