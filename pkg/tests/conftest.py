"""Shared helpers: random object factories and grid comparison utilities."""
import warnings

import numpy as np
import pytest

from metaplectic.gausscalc import GaussianState, eval_state
from metaplectic.gridlab import GridFn, norm2, sample


@pytest.fixture(autouse=True)
def _quiet_sampling():
    # grid tests intentionally sample states with visible tails; the aliasing
    # warning is the library doing its job, not a test failure
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_state(rng, d, spread=0.8):
    """Random Gaussian state with Im Q comfortably positive definite."""
    A = rng.normal(size=(d, d)) * spread
    B = rng.normal(size=(d, d)) * spread
    Q = (A + A.T) / 2 + 1j * (B @ B.T + np.eye(d) * 0.6)
    b = rng.normal(size=d) + 1j * rng.normal(size=d) * 0.3
    c = rng.normal() + 1j * rng.normal()
    while abs(c) < 0.1:
        c = rng.normal() + 1j * rng.normal()
    return GaussianState(d, c, Q, b)


def rel_l2(g, state):
    """Relative discrete L^2 distance between grid values and a sampled state."""
    ref = sample(state, g.spec)
    return norm2(GridFn(g.spec, g.values - ref.values)) / norm2(ref)


def rel_values(got, want):
    got = np.asarray(got)
    want = np.asarray(want)
    return float(np.linalg.norm(got - want) / max(np.linalg.norm(want), 1e-300))
