import numpy as np
import pytest

from qampa.problem import ProblemInstance, generate_instance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def inst4():
    return generate_instance(4, 2, seed=7)


@pytest.fixture
def inst6():
    return generate_instance(6, 3, seed=11)


def make_instance(n, couplings, kappa=None, fields=None):
    return ProblemInstance(n, n // 2 if kappa is None else kappa, np.asarray(couplings, float),
                           np.zeros(n) if fields is None else np.asarray(fields, float))
