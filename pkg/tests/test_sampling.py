"""Stationary sampler: spacing law, marginals, densities."""

import numpy as np
import pytest
from scipy import special, stats

from wasserstein_particles import (ParticleConfig, SimParams, ZeroSpacingError,
                                   log_density_qn, marginal_test, replica_rng,
                                   sample_config, sample_spacing_batch)
from wasserstein_particles.sampling import (beta_cdf_pair, ks_critical_value,
                                            ks_from_cdf_pairs, ks_p_value,
                                            marginal_log_tails)


def test_single_particleless_config(rng):
    params = SimParams(n=1, beta=2.0)
    x = sample_config(params, rng)
    assert x.n_particles == 0


def test_spacings_form_simplex(rng):
    batch = sample_spacing_batch(16, 0.3, 500, rng)
    assert batch.spacings.shape == (500, 16)
    assert np.all(batch.spacings >= 0)
    assert np.allclose(batch.spacings.sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(np.exp(batch.log_spacings).sum(axis=1), 1.0, atol=1e-10)


def test_coordinate_means(rng):
    # exchangeable spacings force E x^i = i/N
    n, count = 50, 100_000
    pos = sample_spacing_batch(n, 1.0, count, rng, want_log=False).positions()
    means = pos.mean(axis=0)
    stderr = pos.std(axis=0, ddof=1) / np.sqrt(count)
    target = np.arange(1, n) / n
    assert np.all(np.abs(means - target) <= 3 * stderr + 1e-12)


def test_two_particle_uniform_marginal(rng):
    # N=2, beta=2: x^1 ~ Beta(1,1) = Uniform
    pos = sample_spacing_batch(2, 2.0, 100_000, rng, want_log=False).positions()
    _, p = stats.kstest(pos[:, 0], "uniform")
    assert p > 0.01


def test_marginal_suite_moderate(rng):
    params = SimParams(n=8, beta=2.0)
    batch = sample_spacing_batch(8, 2.0, 50_000, rng)
    report = marginal_test(batch, params)
    assert report.passed()


def test_marginal_suite_extreme_corner(rng):
    # beta/N tiny: marginals concentrate below double resolution; the
    # log-space transform keeps the suite honest there
    params = SimParams(n=64, beta=0.3)
    batch = sample_spacing_batch(64, 0.3, 20_000, rng)
    report = marginal_test(batch, params)
    assert report.passed()


def test_marginal_negative_control(rng):
    params = SimParams(n=8, beta=1.0)
    batch = sample_spacing_batch(8, 2.5, 50_000, rng)   # wrong beta
    report = marginal_test(batch, params)
    assert report.n_failures(0.01) > len(report.rows) / 2


def test_log_density_examples():
    p2 = SimParams(n=2, beta=2.0)
    assert log_density_qn(ParticleConfig(np.array([0.5])), p2) == pytest.approx(0.0, abs=1e-14)
    assert log_density_qn(ParticleConfig(np.array([0.123])), p2) == pytest.approx(0.0, abs=1e-14)

    p3 = SimParams(n=3, beta=3.0)
    a = log_density_qn(ParticleConfig(np.array([0.1, 0.4])), p3)
    b = log_density_qn(ParticleConfig(np.array([0.6, 0.9])), p3)
    assert a == b  # flat density

    with pytest.raises(ZeroSpacingError):
        log_density_qn(ParticleConfig(np.array([0.5, 0.5])), p3)


def test_log_density_matches_direct_formula(rng):
    n, beta = 6, 0.7
    params = SimParams(n=n, beta=beta)
    for _ in range(20):
        pos = np.sort(rng.random(n - 1))
        x = ParticleConfig(pos)
        d = np.diff(np.concatenate([[0.0], pos, [1.0]]))
        direct = (special.gammaln(beta) - n * special.gammaln(beta / n)
                  + (beta / n - 1) * np.log(d).sum())
        assert log_density_qn(x, params) == pytest.approx(direct, rel=1e-13)


def test_beta_cdf_pair_matches_scipy(rng):
    a, b = 0.35, 1.7
    x = rng.random(200) * 0.999 + 5e-4
    lower, upper = beta_cdf_pair(a, b, np.log(x), np.log1p(-x))
    assert np.allclose(lower, special.betainc(a, b, x), atol=1e-13)
    assert np.allclose(upper, 1.0 - special.betainc(a, b, x), atol=1e-12)


def test_ks_machinery_matches_scipy(rng):
    u = rng.random(5000)
    stat = ks_from_cdf_pairs(u, 1.0 - u)
    ref = stats.kstest(u, "uniform").statistic
    assert stat == pytest.approx(ref, abs=1e-12)
    assert ks_p_value(stat, u.size) == pytest.approx(
        stats.kstest(u, "uniform").pvalue, rel=0.05)
    crit = ks_critical_value(0.01, u.size)
    assert ks_p_value(crit, u.size) == pytest.approx(0.01, rel=1e-6)


def test_marginal_log_tails_consistency(rng):
    batch = sample_spacing_batch(8, 1.0, 100, rng)
    log_x, log_c = marginal_log_tails(batch.log_spacings)
    pos = batch.positions()
    mask = pos > 1e-300
    assert np.allclose(np.exp(log_x)[mask], pos[mask], rtol=1e-10)
    assert np.allclose(np.exp(log_x) + np.exp(log_c), 1.0, atol=1e-12)


def test_reproducibility():
    a = sample_spacing_batch(10, 0.5, 50, replica_rng(7)).spacings
    b = sample_spacing_batch(10, 0.5, 50, replica_rng(7)).spacings
    assert np.array_equal(a, b)
