"""Discrete and continuum divergence functionals.

The discrete divergence of the vector field zeta^N(x)_i = w_N(x) phi(x_i)
with respect to the stationary configuration law splits as
``w_N * V_disc + <grad w_N, phi(x)>``; the continuum divergence of
``zeta(g,t) = w(g) phi(g(t))`` with respect to the quantile-space invariant
law splits the same way with the jump functional ``V``.  Grid marginals of a
fixed step quantile connect the two, which is what the convergence sweeps
exercise.

Difference quotients ``(phi(b) - phi(a))/(b - a)`` degenerate to phi'(a) for
spacings at or below 1e-12: the exact-zero case is the continuity limit,
and just above zero the floating-point quotient would be cancellation noise.
"""

from __future__ import annotations

import numpy as np

from .config import ParticleConfig
from .cylinder import (VectorFieldSpec, condexp_quantile, gl_panel_integrate,
                       hat_coefficients)
from .params import SimParams
from .quantiles import QuantileStep
from .testfunctions import TestFunction

_QTOL = 1e-12


def safe_quotients(phi: TestFunction, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(phi(b)-phi(a))/(b-a) with the continuity limit phi'(a) for b-a <= 1e-12."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    wide = d > _QTOL
    return np.where(wide, (phi.f(b) - phi.f(a)) / np.where(wide, d, 1.0), phi.d1(a))


def v_beta_discrete(x: ParticleConfig, phi: TestFunction, params: SimParams) -> float:
    """Configuration-space drift part of the discrete divergence:
    (beta/N - 1) * sum of spacing difference quotients of phi, plus the sum
    of phi' over the interior particles."""
    n, beta = params.n, params.beta
    if x.n != n:
        raise ValueError(f"config has N={x.n}, params have N={n}")
    xs = x.with_boundaries()
    q = safe_quotients(phi, xs[:-1], xs[1:])
    interior = float(np.sum(phi.d1(x.positions))) if x.n_particles else 0.0
    return float((beta / n - 1.0) * q.sum() + interior)


def v_beta_continuum(g: QuantileStep, phi: TestFunction, beta: float) -> float:
    """Jump-functional drift on quantiles.

    Sum over jumps of (phi'(g(a+)) + phi'(g(a-)))/2 minus the jump quotient,
    plus beta times the exact integral of phi' along g, minus the endpoint
    correction (phi'(0) + phi'(1))/2.
    """
    lengths = g.interval_lengths()
    integral = float(np.dot(phi.d1(g.values), lengths))
    jumps = g.jump_indices()
    v0 = 0.0
    if jumps.size:
        lo = g.values[jumps - 1]
        hi = g.values[jumps]
        wide = (hi - lo) > _QTOL   # sub-tolerance jumps contribute O(gap^2)
        lo, hi = lo[wide], hi[wide]
        quot = (phi.f(hi) - phi.f(lo)) / (hi - lo)
        v0 = float(np.sum(0.5 * (phi.d1(hi) + phi.d1(lo)) - quot))
    boundary = 0.5 * (float(phi.d1(0.0)) + float(phi.d1(1.0)))
    return v0 + beta * integral - boundary


def gradient_pairing_discrete(x: ParticleConfig, zeta: VectorFieldSpec,
                              params: SimParams) -> float:
    """<grad w_N (x), phi(x)> in R^{N-1}, gradients via hat coefficients."""
    n = params.n
    if x.n_particles == 0:
        return 0.0
    g_x = condexp_quantile(x, n)
    l = zeta.w.l_values(g_x)
    _, partials = zeta.w.value_and_factor_partials(l)
    grad = np.zeros(n - 1)
    for (f, _), p in zip(zeta.w.factors, partials):
        _, c = hat_coefficients(f, n)
        grad += p * c
    return float(np.dot(grad, zeta.phi.f(x.positions)))


def divergence_discrete(x: ParticleConfig, zeta: VectorFieldSpec,
                        params: SimParams) -> float:
    """Divergence of zeta^N under the stationary configuration law."""
    g_x = condexp_quantile(x, params.n)
    w_val = zeta.w.evaluate(g_x)
    return (w_val * v_beta_discrete(x, zeta.phi, params)
            + gradient_pairing_discrete(x, zeta, params))


def compose_inner_product(f: TestFunction, h: TestFunction, g: QuantileStep) -> float:
    """int f(t) h(g(t)) dt for a step quantile, exact per piece."""
    ends = np.concatenate([g.breakpoints[1:], [1.0]])
    if f.antiderivative is not None:
        pieces = f.antiderivative(ends) - f.antiderivative(g.breakpoints)
    else:
        pieces = gl_panel_integrate(f.f, g.breakpoints, ends)
    return float(np.dot(h.f(g.values), pieces))


def gradient_pairing_continuum(g: QuantileStep, zeta: VectorFieldSpec) -> float:
    """<grad w(g)(.), phi(g(.))>_{L2(dx)} for a step quantile."""
    l = zeta.w.l_values(g)
    _, partials = zeta.w.value_and_factor_partials(l)
    return float(sum(p * compose_inner_product(f, zeta.phi, g)
                     for (f, _), p in zip(zeta.w.factors, partials)))


def divergence_continuum(g: QuantileStep, zeta: VectorFieldSpec, beta: float) -> float:
    """Divergence of zeta under the quantile-space invariant law."""
    w_val = zeta.w.evaluate(g)
    return (w_val * v_beta_continuum(g, zeta.phi, beta)
            + gradient_pairing_continuum(g, zeta))


def grid_marginals(g: QuantileStep, n: int) -> ParticleConfig:
    """Configuration g(1/N), ..., g((N-1)/N): the grid restriction of g."""
    pos = g(np.arange(1, n) / n)
    return ParticleConfig(np.asarray(pos, dtype=float))
