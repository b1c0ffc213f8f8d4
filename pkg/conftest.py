"""Shared fixtures for the linfeat test suite"""

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent / "backend"))

import numpy as np
import pytest

from linfeat.dataset import synthesize
from linfeat.features import builtin_sinusoidal, builtin_sum_of_squares


@pytest.fixture(scope="session")
def fixture_dataset():
    """The 40x200 synthetic dataset used across the acceptance checks"""
    return synthesize(n=40, p=200, smoothness=1.0, rank=5, noise_std=1e-4, seed=7)


@pytest.fixture(scope="session")
def sum_of_squares():
    return builtin_sum_of_squares()


@pytest.fixture(scope="session")
def sinusoidal():
    return builtin_sinusoidal(0.06)


@pytest.fixture
def random_problem():
    """Seeded 20x50 centered problem (Xc, yc)"""
    rng = np.random.default_rng(20)
    X = rng.standard_normal((20, 50))
    y = rng.standard_normal(20)
    return X - X.mean(axis=0), y - y.mean()


def feature_response(ds, feature):
    return np.array([feature(row) for row in ds.values])
