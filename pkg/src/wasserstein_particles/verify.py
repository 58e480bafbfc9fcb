"""Verification suites behind the CLI and the acceptance harness.

Each suite returns ``CheckResult`` objects carrying a pass flag plus report
rows; the CLI renders them to CSV and an exit status, the acceptance tests
assert on them directly.  Thresholds are fixed here (not configurable): the
1% KS level with a 3% test-level failure budget, zero generator-bound
violations, 3-sigma bands for the statistical zeros, the [0.85, 1.15]
realized-to-predicted quadratic variation band, and 1e-2 terminal error for
the convergence sweeps with at most one non-monotone step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import (cylinder_corpus, ibp_pairs, parse_cylinder, phi_corpus,
                     quantile_corpus)
from .cylinder import VectorFieldSpec
from .diagnostics import (gap_clump_probability, generator_apply_batch,
                          generator_bound, marginal_test, martingale_series,
                          qv_check)
from .dynamics import (run_replicas, run_replicas_microqv,
                       stationary_chain_endpoints)
from .forms import (divergence_error, ibp_residual_discrete, pairing_error,
                    projection_norm, tnorm_error)
from .interface import gibbs_consistency
from .params import Scheme, SimParams, replica_rng
from .sampling import sample_spacing_batch
from .testfunctions import cosine

KS_LEVEL = 0.01
KS_MAX_FAILURE_FRACTION = 0.03
SWEEP_TOL = 1e-2
SWEEP_NS = tuple(2**k for k in range(4, 13))
QV_RATIO_BAND = (0.85, 1.15)
QV_BOUND_SLACK = 1.05
PROJECTION_NS = (4, 8, 16, 32, 64)
PROJECTION_PROXY_N = 512
GIBBS_TOL = 1e-9


@dataclass
class CheckResult:
    """One named pass/fail check with loggable rows (quantity, value, stderr)."""

    name: str
    passed: bool
    detail: str = ""
    rows: list = field(default_factory=list)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (
            f": {self.detail}" if self.detail else "")


def stationarity_suite(ns=(4, 16, 64), betas=(0.3, 1.0, 10.0),
                       n_samples: int = 100_000, chain_replicas: int = 100_000,
                       chain_burn_in: int = 64, seed: int = 20_240_001,
                       include_chain: bool = True) -> list[CheckResult]:
    """Per-coordinate KS suite for exact draws and ball-walk chain endpoints.

    Chains start from exact stationary draws, so after any burn-in the
    endpoint marginals are still exactly stationary; the suite verifies the
    kernel really preserves the target (and that the sampler matches the
    Beta aggregation law).
    """
    results = []
    for tag in ("exact", "chain") if include_chain else ("exact",):
        rows = []
        n_fail = 0
        n_tests = 0
        rng = replica_rng(seed, 0 if tag == "exact" else 1)
        for n in ns:
            for beta in betas:
                params = SimParams(n=n, beta=beta)
                if tag == "exact":
                    sample = sample_spacing_batch(n, beta, n_samples, rng)
                    report = marginal_test(sample, params)
                else:
                    eps = max(0.5 / n, 0.01)
                    params = SimParams(n=n, beta=beta, epsilon=eps)
                    endpoints, _acc = stationary_chain_endpoints(
                        params, chain_replicas, chain_burn_in, rng)
                    report = marginal_test(endpoints, params)
                for r in report.rows:
                    rows.append(("", f"ks_{tag}_N{n}_beta{beta:g}_x{r.coordinate}",
                                 r.p_value, ""))
                n_fail += report.n_failures(KS_LEVEL)
                n_tests += len(report.rows)
        frac = n_fail / max(n_tests, 1)
        results.append(CheckResult(
            f"stationarity_{tag}", frac <= KS_MAX_FAILURE_FRACTION,
            f"{n_fail}/{n_tests} coordinate tests below the {KS_LEVEL:.0%} level "
            f"(budget {KS_MAX_FAILURE_FRACTION:.0%})", rows))
    return results


def generator_suite(ns=(4, 16, 64), betas=(0.3, 1.0, 10.0), wavenumbers=(1, 2, 3),
                    n_configs: int = 100_000, seed: int = 20_240_002) -> list[CheckResult]:
    """Fuzz the N-scaled generator bound on stationary configurations."""
    rng = replica_rng(seed)
    combos = [(n, beta) for n in ns for beta in betas]
    per = -(-n_configs // len(combos))
    violations = 0
    total = 0
    worst = 0.0
    rows = []
    for n, beta in combos:
        params = SimParams(n=n, beta=beta)
        pos = sample_spacing_batch(n, beta, per, rng, want_log=False).positions()
        for k in wavenumbers:
            f = cosine(k)
            vals = generator_apply_batch(pos, f, params)
            bound = generator_bound(f, params)
            ratio = np.abs(vals) / bound
            violations += int(np.sum(ratio > 1.0))
            total += vals.size
            worst = max(worst, float(ratio.max()))
            rows.append(("", f"generator_maxratio_N{n}_beta{beta:g}_k{k}",
                         float(ratio.max()), ""))
    return [CheckResult("generator_bound", violations == 0,
                        f"{violations}/{total} violations, max |value|/bound = {worst:.4f}",
                        rows)]


def ibp_suite(n: int = 8, beta: float = 1.0, samples: int = 1_000_000,
              seed: int = 20_240_003) -> list[CheckResult]:
    """Discrete integration-by-parts residuals over the shipped pairs."""
    rng = replica_rng(seed)
    params = SimParams(n=n, beta=beta)
    results = []
    rows = []
    all_ok = True
    for idx, (u, zeta) in enumerate(ibp_pairs()):
        est = ibp_residual_discrete(u, zeta, params, samples, rng)
        ok = abs(est.value) <= 3.0 * est.stderr or est.stderr == 0.0
        all_ok &= ok
        rows.append(("", f"ibp_residual_pair{idx}", est.value, est.stderr))
    results.append(CheckResult(
        "ibp_residuals", all_ok,
        f"{len(rows)} pairs at N={n}, beta={beta:g}, {samples} samples", rows))
    return results


def _sweep_family_ok(per_combo_errors: list[list[float]]) -> tuple[bool, str]:
    """Corpus-level convergence: every individual sweep ends below the
    tolerance, and the sup error over the corpus decreases along N with at
    most one non-monotone step.  (Individual sweeps wobble deterministically
    with the grid phase of each jump location; the corpus-level envelope is
    the measured rate.)"""
    terminal_ok = all(errs[-1] < SWEEP_TOL for errs in per_combo_errors)
    sup = [max(col) for col in zip(*per_combo_errors)]
    increases = sum(1 for a, b in zip(sup, sup[1:]) if b > a)
    ok = terminal_ok and increases <= 1
    detail = (f"sup error {sup[0]:.2e} -> {sup[-1]:.2e}, "
              f"{increases} non-monotone step(s), "
              f"worst terminal {max(e[-1] for e in per_combo_errors):.2e} "
              f"(tol {SWEEP_TOL:g})")
    return ok, detail


def divergence_suite(beta: float = 1.0, ns=SWEEP_NS) -> list[CheckResult]:
    """Deterministic discrete-to-continuum sweeps over the shipped corpus."""
    gs = quantile_corpus()
    phis = phi_corpus()
    pair_ws = ["cos:1", "identity^2"]
    results = []

    rows = []
    family = []
    for gi, g in enumerate(gs):
        for phi in phis:
            errs = [divergence_error(g, phi, beta, n) for n in ns]
            family.append(errs)
            rows.append(("", f"vsweep_g{gi}_{phi.name}_final", errs[-1], ""))
    ok, detail = _sweep_family_ok(family)
    results.append(CheckResult(
        "divergence_convergence", ok,
        f"{len(rows)} sweeps over N={ns[0]}..{ns[-1]}; " + detail, rows))

    rows_p = []
    rows_t = []
    family_p = []
    family_t = []
    for gi, g in enumerate(gs):
        for w_spec in pair_ws:
            for phi in phis[:2]:
                zeta = VectorFieldSpec(parse_cylinder(w_spec), phi)
                errs = [pairing_error(g, zeta, beta, n) for n in ns]
                family_p.append(errs)
                rows_p.append(("", f"pairsweep_g{gi}_{w_spec}_{phi.name}_final", errs[-1], ""))
                errs = [tnorm_error(g, zeta, beta, n) for n in ns]
                family_t.append(errs)
                rows_t.append(("", f"tnormsweep_g{gi}_{w_spec}_{phi.name}_final", errs[-1], ""))
    ok_p, detail_p = _sweep_family_ok(family_p)
    ok_t, detail_t = _sweep_family_ok(family_t)
    results.append(CheckResult("gradient_pairing_convergence", ok_p,
                               f"{len(rows_p)} sweeps; " + detail_p, rows_p))
    results.append(CheckResult("field_norm_convergence", ok_t,
                               f"{len(rows_t)} sweeps; " + detail_t, rows_t))
    return results


def projection_suite(beta: float = 1.0, samples: int = 100_000,
                     seed: int = 20_240_004) -> list[CheckResult]:
    """Dyadic projected-norm sweep: nondecreasing within statistical error
    and closing on the high-resolution proxy."""
    rng = replica_rng(seed)
    us = [u for u in cylinder_corpus() if len(u.factors) == 1]
    results = []
    for u in us:
        ests = [projection_norm(u, n, beta, samples, rng) for n in PROJECTION_NS]
        proxy = projection_norm(u, PROJECTION_PROXY_N, beta, samples, rng)
        mono = all(b.value >= a.value - 3.0 * np.hypot(a.stderr, b.stderr)
                   for a, b in zip(ests, ests[1:]))
        gap_first = proxy.value - ests[0].value
        gap_last = proxy.value - ests[-1].value
        closing = gap_last <= 0.25 * gap_first + 3.0 * np.hypot(ests[-1].stderr,
                                                                proxy.stderr)
        rows = [("", f"projection_{u!r}_N{n}", e.value, e.stderr)
                for n, e in zip(PROJECTION_NS, ests)]
        rows.append(("", f"projection_{u!r}_proxyN{PROJECTION_PROXY_N}",
                     proxy.value, proxy.stderr))
        results.append(CheckResult(
            f"projection_norms[{u!r}]", mono and closing,
            f"gap to proxy {gap_first:.3g} -> {gap_last:.3g}", rows))
    return results


def martingale_suite(n: int = 64, beta: float = 1.0, replicas: int = 200,
                     horizon: float = 0.04, record_every: float = 2e-3,
                     dt: float = 1e-5, delta_reg: float = 2e-3,
                     wavenumber: int = 1, seed: int = 20_240_005,
                     jobs: int = 1) -> list[CheckResult]:
    """Martingale increment-mean test over stationary replicas (Euler scheme)."""
    params = SimParams(n=n, beta=beta, dt=dt, delta_reg=delta_reg,
                       horizon=horizon, seed=seed, scheme=Scheme.REGULARIZED_SDE)
    f = cosine(wavenumber)
    paths = run_replicas(params, record_every, replicas, jobs=jobs)
    series = np.array([martingale_series(p, f, beta) for p in paths])
    n_lags = series.shape[1] - 1
    rows = []
    ok = True
    worst = 0.0
    for lag in range(1, n_lags + 1):
        incs = series[:, lag:] - series[:, :-lag]
        per_replica = incs.mean(axis=1)
        mean = float(per_replica.mean())
        stderr = float(per_replica.std(ddof=1) / np.sqrt(replicas))
        z = abs(mean) / stderr if stderr else 0.0
        worst = max(worst, z)
        ok &= z <= 3.0
        rows.append(("", f"martingale_lag{lag}", mean, stderr))
    return [CheckResult(
        "martingale_increments", ok,
        f"max |mean|/stderr = {worst:.2f} over {n_lags} lags, "
        f"{replicas} replicas at N={n}", rows)]


def qv_suite(n: int = 64, beta: float = 1.0, replicas: int = 100,
             horizon: float = 0.05, record_every: float = 1e-3,
             dt: float = 1e-5, delta_reg: float = 2e-3, wavenumber: int = 1,
             seed: int = 20_240_006, jobs: int = 1) -> list[CheckResult]:
    """Quadratic-variation band and bound (Euler scheme, stationary start).

    The realized/predicted ratio uses recorded-grid increments of the
    compensated series, pooled over replicas.  The hard bound
    2*window*sup|f'|^2 (plus 5% discretization slack) is checked with
    realized QV accumulated at the integration step, over every recorded
    window: at step resolution the realized sum concentrates on the
    compensator the bound constrains, while recorded-grid sums over few
    intervals would just be chi^2 noise.
    """
    params = SimParams(n=n, beta=beta, dt=dt, delta_reg=delta_reg,
                       horizon=horizon, seed=seed, scheme=Scheme.REGULARIZED_SDE)
    f = cosine(wavenumber)
    runs = run_replicas_microqv(params, record_every, replicas,
                                wavenumber=wavenumber, jobs=jobs)
    realized_sum = 0.0
    predicted_sum = 0.0
    bound_ok = True
    worst_window = 0.0
    sup_sq = f.sup_d1**2
    rows = []
    for idx, (p, micro_qv) in enumerate(runs):
        res = qv_check(p, f)
        realized_sum += res.realized
        predicted_sum += res.predicted
        rows.append((str(idx), "qv_realized", res.realized, ""))
        cum = np.concatenate([[0.0], np.cumsum(micro_qv)])
        n_rec = len(cum)
        for j in range(n_rec - 1):
            for k in range(j + 1, n_rec):
                window = p.times[k] - p.times[j]
                ratio = (cum[k] - cum[j]) / (2.0 * window * sup_sq)
                if ratio > worst_window:
                    worst_window = ratio
                bound_ok &= ratio <= QV_BOUND_SLACK
    ratio = realized_sum / predicted_sum
    rows.append(("", "qv_pooled_ratio", ratio, ""))
    rows.append(("", "qv_worst_window_vs_bound", worst_window, ""))
    in_band = QV_RATIO_BAND[0] <= ratio <= QV_RATIO_BAND[1]
    return [
        CheckResult("qv_ratio", in_band,
                    f"pooled realized/predicted = {ratio:.4f}, band {QV_RATIO_BAND}",
                    rows),
        CheckResult("qv_bound", bound_ok,
                    f"max windowed QV / (2 window sup|f'|^2) = {worst_window:.4f} "
                    f"over all recorded windows, allowed {QV_BOUND_SLACK}"),
    ]


def gibbs_suite(ns=(4, 16, 64), betas=(0.3, 1.0, 10.0), count: int = 100,
                seed: int = 20_240_007) -> list[CheckResult]:
    """Log-density correspondence between the interface Gibbs measure and
    the configuration law on the (N, beta) grid."""
    rng = replica_rng(seed)
    rows = []
    ok = True
    worst = 0.0
    for n in ns:
        for beta in betas:
            sample = sample_spacing_batch(n, beta, count, rng)
            dev = gibbs_consistency(sample.configs(), beta)
            worst = max(worst, dev)
            ok &= dev <= GIBBS_TOL
            rows.append(("", f"gibbs_dev_N{n}_beta{beta:g}", dev, ""))
    return [CheckResult("gibbs_correspondence", ok,
                        f"max pairwise defect {worst:.2e} (tol {GIBBS_TOL:g})", rows)]


def regime_suite(n: int = 4, betas=(0.3, 1.0, 10.0), threshold: float = 0.01,
                 count: int = 100_000, seed: int = 20_240_008) -> list[CheckResult]:
    """Qualitative clumping regimes: small-gap probability decreasing in beta,
    matching the spacing Beta CDF within 3 standard errors."""
    rng = replica_rng(seed)
    emp = []
    rows = []
    ok = True
    for beta in betas:
        params = SimParams(n=n, beta=beta)
        sample = sample_spacing_batch(n, beta, count, rng, want_log=False)
        # per-config fractions: spacings within one draw are dependent
        frac = (sample.spacings < threshold).mean(axis=1)
        p_emp = float(frac.mean())
        stderr = float(frac.std(ddof=1) / np.sqrt(count))
        p_th = gap_clump_probability(params, threshold)
        ok &= abs(p_emp - p_th) <= 3.0 * stderr
        emp.append(p_emp)
        rows.append(("", f"clump_beta{beta:g}", p_emp, stderr))
        rows.append(("", f"clump_theory_beta{beta:g}", p_th, ""))
    ordered = all(a > b for a, b in zip(emp, emp[1:]))
    ok &= ordered
    return [CheckResult("figure_regimes", ok,
                        f"clumping probabilities {['%.4f' % p for p in emp]} "
                        f"for beta={list(betas)} at threshold {threshold:g}", rows)]


SUITES = {
    "stationarity": stationarity_suite,
    "generator": generator_suite,
    "ibp": ibp_suite,
    "divergence": divergence_suite,
    "projection": projection_suite,
    "martingale": martingale_suite,
    "qv": qv_suite,
    "gibbs": gibbs_suite,
    "regimes": regime_suite,
}
