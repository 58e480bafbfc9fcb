"""Exact sampling of the stationary particle law and its marginal calculus.

The stationary law has Dirichlet(beta/N, ..., beta/N) distributed spacings,
realized by normalizing N independent Gamma(beta/N) variables.  For small
beta/N the Gamma variables (and many of the normalized spacings) fall below
the smallest positive double, so everything is generated in log space via

    Gamma(a)  =d=  Gamma(a+1) * U^(1/a),   U ~ Uniform(0,1],

which keeps log-spacings finite at any shape.  Positions are cumulative sums
of spacings; by Dirichlet aggregation the i-th position is Beta(i*beta/N,
(N-i)*beta/N) distributed, which is the reference law for every
goodness-of-fit check downstream.

CDF values for those Beta marginals are computed from both tails (lower CDF
from the accurate prefix sum, survival from the accurate suffix sum) so the
probability integral transform stays meaningful where the positions
themselves saturate double precision near 0 or 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .config import ParticleConfig
from .errors import SamplerDegenerateError, ZeroSpacingError
from .params import SimParams

_MAX_RESAMPLE = 100


@dataclass(frozen=True)
class SpacingSample:
    """Batch of spacing rows (each row: N spacings summing to 1)."""

    spacings: np.ndarray                 # shape (count, N)
    log_spacings: np.ndarray | None      # same shape, or None

    @property
    def count(self) -> int:
        return self.spacings.shape[0]

    @property
    def n(self) -> int:
        return self.spacings.shape[1]

    def positions(self) -> np.ndarray:
        """Particle positions, shape (count, N-1)."""
        return np.minimum(np.cumsum(self.spacings[:, :-1], axis=1), 1.0)

    def configs(self) -> list[ParticleConfig]:
        pos = self.positions()
        logs = self.log_spacings
        return [
            ParticleConfig(pos[k], spacings=self.spacings[k],
                           log_spacings=None if logs is None else logs[k])
            for k in range(self.count)
        ]


def sample_spacing_batch(n: int, beta: float, count: int,
                         rng: np.random.Generator,
                         want_log: bool = True) -> SpacingSample:
    """Draw ``count`` spacing rows of the Dirichlet(beta/n, ...) law."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if count == 0:
        empty = np.empty((0, n))
        return SpacingSample(empty, empty if want_log else None)
    alpha = beta / n
    log_g = np.empty((count, n))
    todo = np.arange(count)
    for _attempt in range(_MAX_RESAMPLE + 1):
        if todo.size == 0:
            break
        g1 = rng.gamma(alpha + 1.0, size=(todo.size, n))
        u = rng.random((todo.size, n))
        with np.errstate(divide="ignore"):
            draw = np.log(g1) + np.log1p(-u) / alpha
        log_g[todo] = draw
        todo = todo[~np.all(np.isfinite(draw), axis=1)]
    if todo.size:
        raise SamplerDegenerateError(
            f"{_MAX_RESAMPLE} consecutive degenerate spacing draws at n={n} beta={beta}")
    log_total = np.logaddexp.reduce(log_g, axis=1)
    log_sp = log_g - log_total[:, None]
    return SpacingSample(np.exp(log_sp), log_sp if want_log else None)


def sample_config(params: SimParams, rng: np.random.Generator) -> ParticleConfig:
    """One exact draw of the stationary configuration."""
    batch = sample_spacing_batch(params.n, params.beta, 1, rng)
    return batch.configs()[0]


def log_density_qn(x: ParticleConfig, params: SimParams) -> float:
    """Log stationary density at an interior configuration.

    The spacing exponent beta/N - 1 applies to all N spacings including both
    boundary segments.  A zero spacing is a distinct, catchable error: the
    log-density is infinite there.
    """
    n, beta = params.n, params.beta
    if x.n != n:
        raise ValueError(f"config has N={x.n}, params have N={n}")
    log_sp = x.log_spacing_array()
    if np.any(np.isneginf(log_sp)):
        raise ZeroSpacingError("zero spacing: configuration on the boundary of the simplex")
    norm = special.gammaln(beta) - n * special.gammaln(beta / n)
    exponent = beta / n - 1.0
    if exponent == 0.0:
        return float(norm)
    return float(norm + exponent * log_sp.sum())


# ---------------------------------------------------------------------------
# Beta marginal CDF machinery (tail-accurate)
# ---------------------------------------------------------------------------

def _log_beta_norm(a: float, b: float) -> float:
    """log(a * B(a, b)), the normalizer of the x^a leading term at 0."""
    return special.gammaln(a + 1.0) + special.gammaln(b) - special.gammaln(a + b)


def beta_cdf_pair(a: float, b: float, log_x: np.ndarray,
                  log_c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lower CDF and survival of Beta(a, b) from accurate log tails.

    ``log_x`` is log of the sample and ``log_c`` log of its complement, each
    computed without catastrophic cancellation.  The incomplete beta is
    evaluated at whichever of x, c is smaller (that argument retains full
    relative accuracy; the opposite one may have rounded all the way to 1)
    and the other tail value follows by complement, which is only needed to
    absolute precision.  Where even exp underflows, the leading-order
    expansion F(x) ~ x^a / (a B(a, b)) takes over.
    """
    log_x = np.asarray(log_x, dtype=float)
    log_c = np.asarray(log_c, dtype=float)
    x = np.exp(log_x)
    c = np.exp(log_c)
    f_from_x = np.where(x > 0.0, special.betainc(a, b, np.minimum(x, 1.0)),
                        np.exp(a * log_x - _log_beta_norm(a, b)))
    s_from_c = np.where(c > 0.0, special.betainc(b, a, np.minimum(c, 1.0)),
                        np.exp(b * log_c - _log_beta_norm(b, a)))
    x_side = log_x <= log_c
    lower = np.where(x_side, f_from_x, 1.0 - s_from_c)
    upper = np.where(x_side, 1.0 - f_from_x, s_from_c)
    return lower, upper


def ks_from_cdf_pairs(lower: np.ndarray, upper: np.ndarray) -> float:
    """Two-sided KS statistic from per-sample (CDF, survival) pairs.

    Works in whichever tail keeps absolute resolution: below the median the
    plain CDF is used, above it the survival function, so samples that
    collide in one representation still order correctly through the other.
    """
    n = lower.size
    order = np.lexsort((-upper, lower))
    lo = lower[order]
    up = upper[order]
    k = np.arange(1, n + 1, dtype=float)
    use_lower = lo <= 0.5
    d_plus = np.where(use_lower, k / n - lo, up - (n - k) / n)
    d_minus = np.where(use_lower, lo - (k - 1.0) / n, (n - k + 1.0) / n - up)
    return float(max(d_plus.max(), d_minus.max(), 0.0))


def ks_p_value(stat: float, n: int) -> float:
    """Asymptotic KS p-value with the small-sample correction."""
    return float(special.kolmogorov(stat * (np.sqrt(n) + 0.12 + 0.11 / np.sqrt(n))))


def ks_critical_value(level: float, n: int) -> float:
    """Two-sided KS critical value at the given level."""
    return float(special.kolmogi(level) / (np.sqrt(n) + 0.12 + 0.11 / np.sqrt(n)))


def marginal_log_tails(log_spacings: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate log prefix/suffix spacing sums, normalized to log ratios.

    Returns (log_x, log_c) of shape (count, N-1): log of position i and of
    1 - position i, both with full relative accuracy.  Rows may contain -inf
    where spacings are exactly zero.
    """
    fwd = np.logaddexp.accumulate(log_spacings, axis=1)
    bwd = np.logaddexp.accumulate(log_spacings[:, ::-1], axis=1)[:, ::-1]
    total = fwd[:, -1]
    log_x = fwd[:, :-1] - total[:, None]
    log_c = bwd[:, 1:] - total[:, None]
    return log_x, log_c
