import numpy as np
import pytest

from wasserstein_particles import ParticleConfig, QuantileStep


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_config(rng, n):
    """Uniformly random valid configuration of N-1 particles."""
    return ParticleConfig(np.sort(rng.random(n - 1)))


def random_step_quantile(rng, max_pieces=6, allow_flat=False):
    """Random canonical step quantile (strictly increasing values)."""
    m = int(rng.integers(1, max_pieces + 1))
    breaks = np.concatenate([[0.0], np.sort(rng.random(m - 1))])
    breaks = np.unique(breaks)
    vals = np.sort(rng.random(breaks.size))
    if not allow_flat:
        vals = np.unique(vals)
        breaks = breaks[: vals.size]
    return QuantileStep(breaks, vals)
