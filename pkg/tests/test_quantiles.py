"""State-space types and the conversion maps between them."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wasserstein_particles import (EmpiricalMeasure, ParticleConfig,
                                   QuantileStep, embed_quantile,
                                   empirical_measure, gaps,
                                   measure_of_quantile, parse_config,
                                   quantile_of_measure, serialize_config,
                                   wasserstein2)
from wasserstein_particles.corpus import parse_quantile, serialize_quantile

from conftest import random_config, random_step_quantile


def test_config_invariants():
    with pytest.raises(ValueError):
        ParticleConfig(np.array([0.5, 0.2]))
    with pytest.raises(ValueError):
        ParticleConfig(np.array([-0.2, 0.5]))
    with pytest.raises(ValueError):
        ParticleConfig(np.array([0.2, 1.3]))
    empty = ParticleConfig(np.empty(0))
    assert empty.n == 1
    assert empty.spacing_array().tolist() == [1.0]


def test_config_serialization_roundtrip(rng):
    for n in (1, 2, 5, 30):
        x = random_config(rng, n)
        assert parse_config(serialize_config(x)) == x


def test_embed_quantile_examples():
    g = embed_quantile(ParticleConfig(np.array([0.5])))
    assert g.breakpoints.tolist() == [0.0, 0.5]
    assert g.values.tolist() == [0.0, 0.5]

    g1 = embed_quantile(ParticleConfig(np.empty(0)))
    assert g1.breakpoints.tolist() == [0.0]
    assert g1.values.tolist() == [0.0]

    # all particles at 1: pushforward is mass 1/N at 0 plus (N-1)/N at 1
    n = 5
    mu = measure_of_quantile(embed_quantile(ParticleConfig(np.ones(n - 1))))
    assert mu.positions.tolist() == [0.0, 1.0]
    assert np.allclose(mu.weights, [1 / n, (n - 1) / n])


def test_measure_of_quantile_examples():
    const = QuantileStep(np.array([0.0]), np.array([0.3]))
    mu = measure_of_quantile(const)
    assert mu.positions.tolist() == [0.3] and mu.weights.tolist() == [1.0]

    x = ParticleConfig(np.array([0.25, 0.5, 0.75]))
    mu = measure_of_quantile(embed_quantile(x))
    assert mu.positions.tolist() == [0.0, 0.25, 0.5, 0.75]
    assert np.allclose(mu.weights, 0.25)


def test_rho_iota_equals_modified_empirical(rng):
    # exact equality, coincident-atom merging included
    for _ in range(1000):
        n = int(rng.integers(1, 12))
        pos = np.sort(rng.random(n - 1))
        if n > 2 and rng.random() < 0.3:
            pos[1:] = np.where(rng.random(n - 2) < 0.5, pos[:-1], pos[1:])
            pos = np.sort(pos)
        x = ParticleConfig(pos)
        assert measure_of_quantile(embed_quantile(x)) == empirical_measure(x, modified=True)


def test_quantile_measure_bijection(rng):
    mu = EmpiricalMeasure(np.array([0.3]), np.array([1.0]))
    assert quantile_of_measure(mu).values.tolist() == [0.3]

    two = EmpiricalMeasure(np.array([0.2, 0.8]), np.array([0.5, 1.0]))
    g = quantile_of_measure(two)
    assert g.breakpoints.tolist() == [0.0, 0.5]
    assert g.values.tolist() == [0.2, 0.8]

    for _ in range(1000):
        g = random_step_quantile(rng)
        assert quantile_of_measure(measure_of_quantile(g)) == g
    for _ in range(200):
        g = random_step_quantile(rng)
        mu = measure_of_quantile(g)
        assert measure_of_quantile(quantile_of_measure(mu)) == mu


def test_empirical_measure_examples():
    x = ParticleConfig(np.array([0.25, 0.75]))
    mu = empirical_measure(x)
    assert np.allclose(mu.weights, 0.5) and mu.positions.tolist() == [0.25, 0.75]

    nu = empirical_measure(x, modified=True)
    assert nu.positions.tolist() == [0.0, 0.25, 0.75]
    assert np.allclose(nu.weights, 1 / 3)

    merged = empirical_measure(ParticleConfig(np.array([0.5, 0.5])))
    assert merged.positions.tolist() == [0.5] and merged.weights.tolist() == [1.0]

    with pytest.raises(ValueError):
        empirical_measure(ParticleConfig(np.empty(0)), modified=False)


def test_gaps_examples():
    mu = EmpiricalMeasure(np.array([0.5]), np.array([1.0]))
    assert [(iv.left, iv.right) for iv in gaps(mu)] == [(0.0, 0.5), (0.5, 1.0)]

    ends = EmpiricalMeasure(np.array([0.0, 1.0]), np.array([0.5, 1.0]))
    assert [(iv.left, iv.right) for iv in gaps(ends)] == [(0.0, 1.0)]

    three = EmpiricalMeasure(np.array([0.0, 0.25, 0.75]), np.array([0.25, 0.5, 1.0]))
    assert [(iv.left, iv.right) for iv in gaps(three)] == [
        (0.0, 0.25), (0.25, 0.75), (0.75, 1.0)]


def test_wasserstein2_examples():
    zero = QuantileStep(np.array([0.0]), np.array([0.0]))
    one = QuantileStep(np.array([0.0]), np.array([1.0]))
    assert wasserstein2(zero, one) == pytest.approx(1.0, abs=1e-15)
    assert wasserstein2(one, one) == 0.0
    half = QuantileStep(np.array([0.0, 0.5]), np.array([0.0, 1.0]))
    assert wasserstein2(zero, half) == pytest.approx(np.sqrt(0.5), abs=1e-15)


def test_wasserstein2_metric_axioms(rng):
    for _ in range(300):
        g1, g2, g3 = (random_step_quantile(rng) for _ in range(3))
        d12, d21 = wasserstein2(g1, g2), wasserstein2(g2, g1)
        assert d12 == d21
        assert d12 >= 0
        assert wasserstein2(g1, g1) == 0.0
        assert d12 <= wasserstein2(g1, g3) + wasserstein2(g3, g2) + 1e-12


@given(st.integers(min_value=1, max_value=20), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=50, deadline=None)
def test_quantile_serialization_roundtrip(n, seed):
    g = random_step_quantile(np.random.default_rng(seed), max_pieces=n)
    assert parse_quantile(serialize_quantile(g)) == g


def test_w2_against_scipy(rng):
    # independent oracle: scipy's CDF-based 1-d Wasserstein via sampled atoms
    from scipy.stats import wasserstein_distance
    for _ in range(50):
        g1 = random_step_quantile(rng)
        g2 = random_step_quantile(rng)
        m1, m2 = measure_of_quantile(g1), measure_of_quantile(g2)
        # p=1 comparison: integral |g1 - g2| equals scipy's distance
        grid = np.union1d(g1.breakpoints, g2.breakpoints)
        lengths = np.diff(np.concatenate([grid, [1.0]]))
        d1 = float(np.sum(np.abs(g1(grid) - g2(grid)) * lengths))
        ref = wasserstein_distance(m1.positions, m2.positions,
                                   m1.weights, m2.weights)
        assert d1 == pytest.approx(ref, abs=1e-12)
