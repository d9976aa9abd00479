import os
import sys

_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, _ROOT)

import numpy as np
import pytest

from duffing_model import ModelSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20030317)


@pytest.fixture
def unit_spec():
    """omega = mu = A = 1, third order, plain LP"""
    return ModelSpec(omega=1.0, mu=1.0, amplitude=1.0, lambda_=0.0, order=3)


def random_specs(rng, count, order=3):
    """Specs with omega in [0.5, 2], mu in [0.1, 5], A in [0.1, 5], lambda in [0, 3]"""
    return [
        ModelSpec(omega=rng.uniform(0.5, 2), mu=rng.uniform(0.1, 5),
                  amplitude=rng.uniform(0.1, 5), lambda_=rng.uniform(0, 3), order=order)
        for _ in range(count)
    ]
