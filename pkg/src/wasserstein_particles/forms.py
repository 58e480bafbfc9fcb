"""Monte Carlo estimates of the quadratic forms and their consistency checks.

The configuration-space form (scaled by N) and its quantile-space limit are
both estimated by averaging squared gradients over exact stationary samples;
integration-by-parts residuals pair both sides on a shared sample stream so
the residual itself carries a standard error.  The deterministic sweeps at
the bottom track the discrete-to-continuum convergence of the divergence
ingredients along a fixed corpus of step quantiles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cylinder import (CylinderFunctional, VectorFieldSpec, _GL_W, _GL_X,
                       condexp_quantile, gl_panel_integrate, hat_coefficients)
from .divergence import (divergence_continuum, gradient_pairing_continuum,
                         gradient_pairing_discrete, grid_marginals,
                         v_beta_continuum, v_beta_discrete, _QTOL)
from .params import SimParams
from .quantiles import QuantileStep
from .sampling import sample_spacing_batch
from .testfunctions import TestFunction

_BLOCK = 65536


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo estimate with its standard error."""

    value: float
    stderr: float
    n_samples: int

    def __float__(self):
        return self.value

    def consistent_with(self, target: float, n_sigma: float = 3.0) -> bool:
        return abs(self.value - target) <= n_sigma * self.stderr

    def __repr__(self):
        return f"MCEstimate({self.value:.6g} +/- {self.stderr:.2g}, n={self.n_samples})"


def _mc_mean(sample_fn, total: int, rng: np.random.Generator,
             block: int = _BLOCK) -> MCEstimate:
    """Mean/stderr of a per-sample statistic, accumulated block by block.

    Uses the parallel mean/M2 combination, which stays exact for constant
    statistics (no catastrophic cancellation in the variance).
    """
    if total < 1:
        raise ValueError("need at least one sample")
    count = 0
    mean = 0.0
    m2 = 0.0
    while count < total:
        k = min(block, total - count)
        v = np.asarray(sample_fn(k, rng), dtype=float)
        b_mean = float(v.mean())
        b_m2 = float(np.sum((v - b_mean) ** 2))
        delta = b_mean - mean
        mean += delta * k / (count + k)
        m2 += b_m2 + delta * delta * count * k / (count + k)
        count += k
    var = m2 / max(total - 1, 1)
    return MCEstimate(mean, float(np.sqrt(var / total)), total)


# ---------------------------------------------------------------------------
# batched cylinder-functional evaluation on configurations
# ---------------------------------------------------------------------------

def _powers(u: CylinderFunctional) -> np.ndarray:
    return np.array([k for _, k in u.factors], dtype=float)


def condexp_l_matrix(u: CylinderFunctional, pos: np.ndarray, n: int) -> np.ndarray:
    """<f_j, g_X> for every row of positions; affine in the positions."""
    cols = []
    for f, _ in u.factors:
        c0, c = hat_coefficients(f, n)
        cols.append(c0 + pos @ c)
    return np.column_stack(cols) if cols else np.empty((pos.shape[0], 0))


def values_and_partials(u: CylinderFunctional, l_mat: np.ndarray):
    """u and du/dl_j row-wise from the factor-value matrix."""
    count, m = l_mat.shape
    powers = _powers(u)
    factor_pows = l_mat ** powers if m else np.empty((count, 0))
    values = factor_pows.prod(axis=1) if m else np.ones(count)
    partials = np.empty((count, m))
    for j in range(m):
        rest = np.ones(count)
        for i in range(m):
            if i != j:
                rest = rest * factor_pows[:, i]
        partials[:, j] = powers[j] * l_mat[:, j] ** (powers[j] - 1.0) * rest
    return values, partials


def condexp_gradient_batch(u: CylinderFunctional, pos: np.ndarray, n: int):
    """(u_N values, grad u_N matrix) over rows of positions."""
    l_mat = condexp_l_matrix(u, pos, n)
    values, partials = values_and_partials(u, l_mat)
    grad = np.zeros_like(pos)
    for j, (f, _) in enumerate(u.factors):
        _, c = hat_coefficients(f, n)
        grad += partials[:, j:j + 1] * c
    return values, grad


def _v_beta_discrete_batch(pos: np.ndarray, phi: TestFunction, n: int,
                           beta: float) -> np.ndarray:
    padded = np.concatenate([np.zeros((pos.shape[0], 1)), pos,
                             np.ones((pos.shape[0], 1))], axis=1)
    a, b = padded[:, :-1], padded[:, 1:]
    d = b - a
    wide = d > _QTOL
    quot = np.where(wide, (phi.f(b) - phi.f(a)) / np.where(wide, d, 1.0), phi.d1(a))
    return (beta / n - 1.0) * quot.sum(axis=1) + phi.d1(pos).sum(axis=1)


# ---------------------------------------------------------------------------
# form estimates
# ---------------------------------------------------------------------------

def form_estimate_discrete(u: CylinderFunctional, params: SimParams,
                           samples: int, rng: np.random.Generator) -> MCEstimate:
    """N-scaled configuration-space form N * E|grad u_N|^2 at stationarity."""
    n, beta = params.n, params.beta

    def stat(k, rng):
        pos = sample_spacing_batch(n, beta, k, rng, want_log=False).positions()
        _, grad = condexp_gradient_batch(u, pos, n)
        return n * np.sum(grad * grad, axis=1)

    return _mc_mean(stat, samples, rng)


def l2_gram(functions) -> np.ndarray:
    """Gram matrix <f_i, f_j>_{L2[0,1]} by composite Gauss-Legendre."""
    panels = np.linspace(0.0, 1.0, 33)
    nodes = panels[:-1, None] + np.diff(panels)[:, None] * _GL_X
    weights = (np.diff(panels)[:, None] * _GL_W).ravel()
    vals = np.array([f.f(nodes).ravel() for f in functions])
    return (vals * weights) @ vals.T


def iota_cell_integrals(f: TestFunction, n: int) -> np.ndarray:
    """int of f over the grid cells [i/n, (i+1)/n) for i = 1..n-1."""
    grid = np.arange(n + 1) / n
    if f.antiderivative is not None:
        cells = f.antiderivative(grid[1:]) - f.antiderivative(grid[:-1])
    else:
        cells = gl_panel_integrate(f.f, grid[:-1], grid[1:])
    return cells[1:]


def form_estimate_continuum(u: CylinderFunctional, resolution: int, samples: int,
                            beta: float, rng: np.random.Generator) -> MCEstimate:
    """Quantile-space form E|grad u|^2_{L2} over staircase embeddings of
    stationary draws at the given grid resolution."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    funcs = [f for f, _ in u.factors]
    gram = l2_gram(funcs)
    coefs = [iota_cell_integrals(f, resolution) for f in funcs]

    def stat(k, rng):
        pos = sample_spacing_batch(resolution, beta, k, rng, want_log=False).positions()
        if not funcs:
            return np.zeros(k)
        l_mat = np.column_stack([pos @ d for d in coefs])
        _, partials = values_and_partials(u, l_mat)
        return np.einsum("bi,ij,bj->b", partials, gram, partials)

    return _mc_mean(stat, samples, rng)


def ibp_residual_discrete(u: CylinderFunctional, zeta: VectorFieldSpec,
                          params: SimParams, samples: int,
                          rng: np.random.Generator) -> MCEstimate:
    """Residual of the discrete integration-by-parts identity.

    Per sample: (<grad u_N, zeta^N>_{R^{N-1}} + u_N * div zeta^N) / N, whose
    stationary mean is zero; both terms are evaluated on the same draw so
    the difference is estimated directly.
    """
    n, beta = params.n, params.beta
    phi = zeta.phi

    def stat(k, rng):
        pos = sample_spacing_batch(n, beta, k, rng, want_log=False).positions()
        u_val, u_grad = condexp_gradient_batch(u, pos, n)
        w_val, w_grad = condexp_gradient_batch(zeta.w, pos, n)
        phi_pos = phi.f(pos)
        v = _v_beta_discrete_batch(pos, phi, n, beta)
        div = w_val * v + np.sum(w_grad * phi_pos, axis=1)
        pairing = w_val * np.sum(u_grad * phi_pos, axis=1)
        return (pairing + u_val * div) / n

    return _mc_mean(stat, samples, rng)


def projection_norm(u: CylinderFunctional, n: int, beta: float, samples: int,
                    rng: np.random.Generator) -> MCEstimate:
    """RMS of u evaluated through the grid conditional expectation.

    Estimates the H^N norm of the projected functional; along dyadic N these
    are nondecreasing and approach the quantile-space norm of u.
    """

    def stat(k, rng):
        pos = sample_spacing_batch(n, beta, k, rng, want_log=False).positions()
        l_mat = condexp_l_matrix(u, pos, n)
        values, _ = values_and_partials(u, l_mat)
        return values * values

    sq = _mc_mean(stat, samples, rng)
    rms = float(np.sqrt(max(sq.value, 0.0)))
    stderr = sq.stderr / (2 * rms) if rms > 0 else sq.stderr
    return MCEstimate(rms, float(stderr), samples)


# ---------------------------------------------------------------------------
# discrete-to-continuum convergence sweeps (deterministic, corpus-driven)
# ---------------------------------------------------------------------------

def divergence_error(g: QuantileStep, phi: TestFunction, beta: float, n: int) -> float:
    """|V_disc at the grid marginals - V at the quantile|."""
    params = SimParams(n=n, beta=beta)
    return abs(v_beta_discrete(grid_marginals(g, n), phi, params)
               - v_beta_continuum(g, phi, beta))


def pairing_error(g: QuantileStep, zeta: VectorFieldSpec, beta: float, n: int) -> float:
    """|<grad w_N, phi vec> at the grid marginals - <grad w, phi o g>_{L2}|."""
    params = SimParams(n=n, beta=beta)
    return abs(gradient_pairing_discrete(grid_marginals(g, n), zeta, params)
               - gradient_pairing_continuum(g, zeta))


def tnorm_error(g: QuantileStep, zeta: VectorFieldSpec, beta: float, n: int) -> float:
    """|squared T^N-norm integrand at the grid marginals - its limit|."""
    x = grid_marginals(g, n)
    w_n = zeta.w.evaluate(condexp_quantile(x, n))
    phi_sq = zeta.phi.f(x.positions) ** 2
    h_n = w_n * w_n * phi_sq.sum() / n
    w = zeta.w.evaluate(g)
    lengths = g.interval_lengths()
    h = w * w * float(np.dot(zeta.phi.f(g.values) ** 2, lengths))
    return abs(h_n - h)


def convergence_sweep(error_fn, ns) -> list[tuple[int, float]]:
    """[(N, error)] for a deterministic error functional along a grid of N."""
    return [(int(n), float(error_fn(int(n)))) for n in ns]


def projection_sweep(u: CylinderFunctional, ns, beta: float, samples: int,
                     rng: np.random.Generator) -> list[tuple[int, MCEstimate]]:
    """Projected-norm estimates along a (typically dyadic) grid of N."""
    return [(int(n), projection_norm(u, int(n), beta, samples, rng)) for n in ns]
