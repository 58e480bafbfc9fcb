"""Lattice-interface view of the particle system.

Height variables phi(1..N-1) on the scaled simplex sqrt(N)*Sigma_N with
pinned boundaries phi(0) = 0, phi(N) = sqrt(N), interacting through the
logarithmic nearest-neighbor potential V(r) = (1 - beta/N) log r.  The map
to particle configurations is the pure scaling x = phi/sqrt(N); one
macroscopic time unit of the particle system corresponds to N^2 units of
microscopic interface time, so no separate dynamics engine is needed: the
interface process is the scaled particle process.

Like configurations, interface states can carry log increments alongside the
heights: at small beta/N the stationary law puts most increments far below
height resolution, and the energy is a function of the increments only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ParticleConfig
from .dynamics import SimulationPath
from .errors import InfiniteEnergyError
from .params import SimParams
from .quantiles import QuantileStep, embed_quantile
from .sampling import log_density_qn

_REL_TOL = 1e-15


@dataclass(frozen=True)
class InterfaceState:
    """Ordered nonnegative heights below sqrt(N), boundaries implicit."""

    n: int
    heights: np.ndarray
    log_increments: np.ndarray | None = None

    def __post_init__(self):
        h = np.asarray(self.heights, dtype=float)
        h.setflags(write=False)
        object.__setattr__(self, "heights", h)
        if h.size != self.n - 1:
            raise ValueError(f"need N-1 = {self.n - 1} heights, got {h.size}")
        top = math.sqrt(self.n)
        if h.size and (h[0] < 0 or h[-1] > top * (1 + _REL_TOL)
                       or np.any(np.diff(h) < 0)):
            raise ValueError("heights must be nondecreasing in [0, sqrt(N)]")
        li = self.log_increments
        if li is not None:
            li = np.asarray(li, dtype=float)
            if li.shape != (self.n,):
                raise ValueError("log_increments must have length N")
            li.setflags(write=False)
            object.__setattr__(self, "log_increments", li)

    def log_increment_array(self) -> np.ndarray:
        """Log height increments; zero increments map to -inf."""
        if self.log_increments is not None:
            return self.log_increments
        top = math.sqrt(self.n)
        inc = np.diff(np.concatenate([[0.0], self.heights, [top]]))
        with np.errstate(divide="ignore"):
            return np.log(inc)


def hamiltonian(phi: InterfaceState, beta: float) -> float:
    """Sum of (1 - beta/N) log of the height increments.

    Vanishes identically at beta = N; a non-positive increment is infinite
    energy and raises a distinct error.
    """
    log_inc = phi.log_increment_array()
    if np.any(~np.isfinite(log_inc)):
        raise InfiniteEnergyError("zero height increment has infinite energy")
    coef = 1.0 - beta / phi.n
    if coef == 0.0:
        return 0.0
    return float(coef * log_inc.sum())


def to_interface(x: ParticleConfig) -> InterfaceState:
    """Scale positions up to heights: phi(i) = sqrt(N) x^i."""
    root = math.sqrt(x.n)
    log_inc = x.log_spacing_array() + math.log(root)
    return InterfaceState(x.n, x.positions * root, log_increments=log_inc)


def from_interface(phi: InterfaceState) -> ParticleConfig:
    """Scale heights down to positions: x^i = phi(i)/sqrt(N); phi(N) maps to 1."""
    return ParticleConfig(np.minimum(phi.heights / math.sqrt(phi.n), 1.0))


def gibbs_consistency(samples: list[ParticleConfig], beta: float,
                      interface_beta: float | None = None) -> float:
    """Largest pairwise defect between the two log-density differences.

    For any two configurations, log q(x_a) - log q(x_b) must equal
    H(phi_b) - H(phi_a): the per-coordinate Jacobian log sqrt(N) of the
    scaling and the normalization constants are shared, so they cancel in
    differences.  Returns the max absolute defect (0 up to rounding).
    Passing a different ``interface_beta`` deliberately mismatches the two
    densities (negative control).
    """
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    if interface_beta is None:
        interface_beta = beta
    n = samples[0].n
    params = SimParams(n=n, beta=beta)
    vals = []
    for x in samples:
        if x.n != n:
            raise ValueError("samples must share one N")
        vals.append(log_density_qn(x, params)
                    + hamiltonian(to_interface(x), interface_beta))
    vals = np.array(vals)
    # log q + H is the same constant for every sample iff the densities match
    return float(vals.max() - vals.min())


def fluctuation_field(path: SimulationPath) -> list[QuantileStep]:
    """Space-time scaled interface field along a path.

    The field at macroscopic time t is exactly the staircase embedding of
    the particle state; the time relabeling (N^2 microscopic units per
    macroscopic unit) is carried by path.times.
    """
    return [embed_quantile(s) for s in path.states]
