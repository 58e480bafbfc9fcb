"""Statistical verification of simulated paths against the limit dynamics.

Three layers:

* pathwise: the compensated observable process (drift functional built from
  the gap structure of the empirical measure) should be a martingale with
  quadratic variation 2 * int <(f')^2, mu_s> ds;
* configuration-wise: the N-scaled generator applied to additive observables
  obeys an explicit uniform-in-N bound;
* sample-wise: coordinate marginals of the stationary law are Beta by
  spacing aggregation, checked by tail-accurate KS tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .config import ParticleConfig
from .divergence import _QTOL
from .dynamics import SimulationPath
from .params import SimParams
from .quantiles import EmpiricalMeasure, empirical_measure, gaps
from .sampling import (SpacingSample, beta_cdf_pair, ks_from_cdf_pairs,
                       ks_p_value, marginal_log_tails)
from .testfunctions import TestFunction


def drift_functional(mu: EmpiricalMeasure, f: TestFunction, beta: float) -> float:
    """Drift integrand of the compensated observable <f, mu>.

    beta <f'', mu> plus, over every gap of the support (boundary gaps
    included), the mean of f'' at the gap ends minus the difference quotient
    of f' across the gap, minus the endpoint correction (f''(0)+f''(1))/2.
    Gaps below 1e-12 contribute O(gap^2) and are skipped, which also makes
    the value invariant under merging coincident atoms.
    """
    if not f.neumann:
        raise ValueError("drift functional needs f'(0) = f'(1) = 0")
    intervals = gaps(mu)
    lefts = np.array([iv.left for iv in intervals])
    rights = np.array([iv.right for iv in intervals])
    widths = rights - lefts
    keep = widths > _QTOL
    lefts, rights, widths = lefts[keep], rights[keep], widths[keep]
    gap_terms = 0.0
    if lefts.size:
        gap_terms = float(np.sum(0.5 * (f.d2(lefts) + f.d2(rights))
                                 - (f.d1(rights) - f.d1(lefts)) / widths))
    boundary = 0.5 * (float(f.d2(0.0)) + float(f.d2(1.0)))
    return beta * mu.integrate(f.d2) + gap_terms - boundary


def _nu_measures(path: SimulationPath) -> list[EmpiricalMeasure]:
    return [empirical_measure(s, modified=True) for s in path.states]


def martingale_series(path: SimulationPath, f: TestFunction, beta: float) -> np.ndarray:
    """Compensated observable along the recorded grid, normalized to M_0 = 0.

    M_t = <f, nu_t> - <f, nu_0> - int_0^t drift ds, the time integral by the
    trapezoid rule on the recording grid; measures in the modified (extra
    atom at 0) representation.
    """
    if not f.neumann:
        raise ValueError("martingale diagnostics need f'(0) = f'(1) = 0")
    nus = _nu_measures(path)
    obs = np.array([nu.integrate(f.f) for nu in nus])
    drift = np.array([drift_functional(nu, f, beta) for nu in nus])
    dt = np.diff(path.times)
    integral = np.concatenate([[0.0], np.cumsum(0.5 * (drift[1:] + drift[:-1]) * dt)])
    return obs - obs[0] - integral


@dataclass(frozen=True)
class QVResult:
    realized: float
    predicted: float

    @property
    def ratio(self) -> float:
        return self.realized / self.predicted if self.predicted else float("nan")


def qv_check(path: SimulationPath, f: TestFunction) -> QVResult:
    """Realized vs predicted quadratic variation over the full horizon.

    Realized: sum of squared increments of the compensated series on the
    recording grid (recording must be fine enough that the drift part is
    second order).  Predicted: 2 * int <(f')^2, nu_s> ds by the trapezoid
    rule.
    """
    m = martingale_series(path, f, path.params.beta)
    realized = float(np.sum(np.diff(m) ** 2))
    nus = _nu_measures(path)
    integrand = np.array([nu.integrate(lambda t: f.d1(t) ** 2) for nu in nus])
    predicted = 2.0 * float(np.trapezoid(integrand, path.times))
    return QVResult(realized, predicted)


@dataclass(frozen=True)
class GeneratorValue:
    value: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return abs(self.value) <= self.bound


def generator_bound(f: TestFunction, params: SimParams) -> float:
    """Uniform-in-N bound ||f''|| N(beta+1)/(N-1) + ||f'''|| N/(N-1)."""
    if f.sup_d2 is None or f.sup_d3 is None:
        raise ValueError("need sup-norm bounds for f'' and f'''")
    n, beta = params.n, params.beta
    return f.sup_d2 * n * (beta + 1.0) / (n - 1.0) + f.sup_d3 * n / (n - 1.0)


def generator_apply_batch(pos: np.ndarray, f: TestFunction,
                          params: SimParams) -> np.ndarray:
    """N-scaled generator on the additive observable, row-wise.

    Three-term decomposition: (beta/(N-1)) * sum of f' difference quotients
    over all N spacings, plus N/(N-1) times the defect sum
    f''(x_i) - quotient_i over interior particles, minus N/(N-1) times the
    last boundary quotient.  Equals the drift-plus-Laplacian generator
    applied to the mean of f over particles, scaled by N.
    """
    n, beta = params.n, params.beta
    if n < 2:
        raise ValueError("generator diagnostics need N >= 2")
    count = pos.shape[0]
    padded = np.concatenate([np.zeros((count, 1)), pos, np.ones((count, 1))], axis=1)
    a, b = padded[:, :-1], padded[:, 1:]
    d = b - a
    wide = d > _QTOL
    quot = np.where(wide, (f.d1(b) - f.d1(a)) / np.where(wide, d, 1.0), f.d2(a))
    s = quot.sum(axis=1)
    defect = (f.d2(pos) - quot[:, :-1]).sum(axis=1)
    return beta / (n - 1.0) * s + n / (n - 1.0) * defect - n / (n - 1.0) * quot[:, -1]


def generator_apply(x: ParticleConfig, f: TestFunction,
                    params: SimParams) -> GeneratorValue:
    """N-scaled generator value at one configuration, with its bound."""
    if not f.neumann:
        raise ValueError("the additive observable needs f'(0) = f'(1) = 0")
    value = float(generator_apply_batch(x.positions[None, :], f, params)[0])
    return GeneratorValue(value, generator_bound(f, params))


# ---------------------------------------------------------------------------
# marginal goodness of fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KSRow:
    coordinate: int
    alpha: float
    beta: float
    statistic: float
    p_value: float


@dataclass(frozen=True)
class MarginalKSReport:
    rows: list[KSRow]
    n_samples: int

    def n_failures(self, level: float = 0.01) -> int:
        return sum(1 for r in self.rows if r.p_value < level)

    def failure_fraction(self, level: float = 0.01) -> float:
        return self.n_failures(level) / max(len(self.rows), 1)

    def passed(self, level: float = 0.01, max_fraction: float = 0.03) -> bool:
        return self.failure_fraction(level) <= max_fraction


def _log_spacing_matrix(samples) -> np.ndarray:
    if isinstance(samples, SpacingSample):
        if samples.log_spacings is not None:
            return samples.log_spacings
        with np.errstate(divide="ignore"):
            return np.log(samples.spacings)
    return np.vstack([c.log_spacing_array() for c in samples])


def marginal_test(samples, params: SimParams) -> MarginalKSReport:
    """Per-coordinate KS tests of x^i against Beta(i beta/N, (N-i) beta/N).

    ``samples`` is a list of configurations or a ``SpacingSample`` batch.
    The test runs on the probability integral transform computed from
    accurate spacing tails, so coordinates near 0 and 1 are not distorted by
    position rounding (KS statistics are invariant under the monotone
    transform).
    """
    n, beta = params.n, params.beta
    log_m = _log_spacing_matrix(samples)
    if log_m.shape[1] != n:
        raise ValueError(f"samples have N={log_m.shape[1]}, params have N={n}")
    if n < 2:
        return MarginalKSReport([], log_m.shape[0])
    log_x, log_c = marginal_log_tails(log_m)
    rows = []
    for i in range(1, n):
        a = i * beta / n
        b = (n - i) * beta / n
        lower, upper = beta_cdf_pair(a, b, log_x[:, i - 1], log_c[:, i - 1])
        stat = ks_from_cdf_pairs(lower, upper)
        rows.append(KSRow(i, a, b, stat, ks_p_value(stat, log_m.shape[0])))
    return MarginalKSReport(rows, log_m.shape[0])


def gap_statistics(samples, params: SimParams, threshold: float) -> float:
    """Empirical probability that a uniformly chosen spacing is below the
    threshold (the clumping statistic behind the qualitative beta regimes)."""
    if not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    if isinstance(samples, SpacingSample):
        sp = samples.spacings
    else:
        sp = np.vstack([c.spacing_array() for c in samples])
    return float(np.mean(sp < threshold))


def gap_clump_probability(params: SimParams, threshold: float) -> float:
    """Stationary probability of a spacing below the threshold: the
    Beta(beta/N, beta(N-1)/N) CDF, from spacing exchangeability."""
    n, beta = params.n, params.beta
    return float(special.betainc(beta / n, beta * (n - 1) / n, threshold))
