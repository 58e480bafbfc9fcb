"""Quantile-function and atomic-measure representations of states.

Three exactly inter-convertible views of a particle configuration:

* ``ParticleConfig``   -- ordered positions in [0,1];
* ``QuantileStep``     -- right-continuous nondecreasing step function on
  [0,1), i.e. the quantile function of a purely atomic probability measure;
* ``EmpiricalMeasure`` -- the atomic measure itself.

The pushforward map ``measure_of_quantile`` and the right-continuous
quantile map ``quantile_of_measure`` are mutually inverse bijections.  To
keep the round trips exact in floating point, ``EmpiricalMeasure`` stores
cumulative weights as primary data (atom weights are first differences),
so neither direction ever re-accumulates a sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ParticleConfig

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class QuantileStep:
    """Cadlag nondecreasing step function [0,1) -> [0,1].

    ``values[j]`` holds on ``[breakpoints[j], breakpoints[j+1])`` with the
    last interval extending to 1.  The first breakpoint is always 0.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or b.shape != v.shape or b.size == 0:
            raise ValueError("breakpoints and values must be equal-length 1-d arrays")
        if b[0] != 0.0:
            raise ValueError("first breakpoint must be 0")
        if np.any(np.diff(b) <= 0) or b[-1] >= 1.0:
            raise ValueError("breakpoints must be strictly increasing within [0,1)")
        if np.any(np.diff(v) < 0) or v[0] < 0 or v[-1] > 1:
            raise ValueError("values must be nondecreasing within [0,1]")
        b.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    def __call__(self, t):
        """Evaluate at t in [0,1) (vectorized, right-continuous)."""
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        return self.values[np.maximum(idx, 0)]

    def interval_lengths(self) -> np.ndarray:
        return np.diff(np.concatenate([self.breakpoints, [1.0]]))

    def jump_indices(self) -> np.ndarray:
        """Indices j >= 1 with values[j] > values[j-1] (the jump set)."""
        return np.nonzero(np.diff(self.values) > 0)[0] + 1

    def canonical(self) -> "QuantileStep":
        """Merge consecutive pieces with equal values."""
        keep = np.concatenate([[True], np.diff(self.values) > 0])
        return QuantileStep(self.breakpoints[keep], self.values[keep])

    def __eq__(self, other):
        if not isinstance(other, QuantileStep):
            return NotImplemented
        return (np.array_equal(self.breakpoints, other.breakpoints)
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.breakpoints.tobytes(), self.values.tobytes()))


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Purely atomic probability measure on [0,1].

    ``cum_weights`` (strictly increasing, ending at 1) is primary; atom
    weights are its first differences.
    """

    positions: np.ndarray
    cum_weights: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float)
        c = np.asarray(self.cum_weights, dtype=float)
        if p.ndim != 1 or p.shape != c.shape or p.size == 0:
            raise ValueError("positions and cum_weights must be equal-length 1-d arrays")
        if np.any(np.diff(p) <= 0) or p[0] < 0 or p[-1] > 1:
            raise ValueError("atom positions must be strictly increasing in [0,1]")
        if np.any(np.diff(c) <= 0) or c[0] <= 0:
            raise ValueError("cumulative weights must be strictly increasing and positive")
        if abs(c[-1] - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1 within {_WEIGHT_TOL}")
        p.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "cum_weights", c)

    @property
    def weights(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.cum_weights]))

    @classmethod
    def from_atoms(cls, positions, weights) -> "EmpiricalMeasure":
        """Build from (position, weight) pairs, merging coincident atoms.

        The last cumulative weight is snapped to exactly 1 when within
        tolerance, so conversion round trips stay exact.
        """
        positions = np.asarray(positions, dtype=float)
        weights = np.asarray(weights, dtype=float)
        order = np.argsort(positions, kind="stable")
        positions, weights = positions[order], weights[order]
        cum = np.cumsum(weights)
        if abs(cum[-1] - 1.0) <= _WEIGHT_TOL:
            cum[-1] = 1.0
        keep = np.concatenate([np.diff(positions) > 0, [True]])
        return cls(positions[keep], cum[keep])

    def integrate(self, f) -> float:
        """Integral of a function against the measure."""
        return float(np.dot(self.weights, f(self.positions)))

    def __eq__(self, other):
        if not isinstance(other, EmpiricalMeasure):
            return NotImplemented
        return (np.array_equal(self.positions, other.positions)
                and np.array_equal(self.cum_weights, other.cum_weights))

    def __hash__(self):
        return hash((self.positions.tobytes(), self.cum_weights.tobytes()))


@dataclass(frozen=True)
class Interval:
    """Open interval (left, right) inside [0,1]."""

    left: float
    right: float

    def __post_init__(self):
        if not (0.0 <= self.left < self.right <= 1.0):
            raise ValueError(f"need 0 <= left < right <= 1, got ({self.left}, {self.right})")

    @property
    def length(self) -> float:
        return self.right - self.left


def embed_quantile(x: ParticleConfig) -> QuantileStep:
    """Staircase quantile of a configuration: value x^i on [i/N, (i+1)/N)."""
    n = x.n
    breakpoints = np.arange(n) / n
    values = np.concatenate([[0.0], np.clip(x.positions, 0.0, 1.0)])
    return QuantileStep(breakpoints, values)


def measure_of_quantile(g: QuantileStep) -> EmpiricalMeasure:
    """Pushforward of Lebesgue measure on [0,1) under g.

    One atom per distinct value; atom weight is the total time g spends at
    that value.  Cumulative weights are read off the breakpoints directly,
    which is what makes the quantile round trip exact.
    """
    keep = np.concatenate([[True], np.diff(g.values) > 0])
    positions = g.values[keep]
    run_starts = np.nonzero(keep)[0]
    cum = np.concatenate([g.breakpoints[run_starts[1:]], [1.0]])
    return EmpiricalMeasure(positions, cum)


def quantile_of_measure(mu: EmpiricalMeasure) -> QuantileStep:
    """Right-continuous quantile function of an atomic measure."""
    breakpoints = np.concatenate([[0.0], mu.cum_weights[:-1]])
    return QuantileStep(breakpoints, mu.positions)


def empirical_measure(x: ParticleConfig, modified: bool = False) -> EmpiricalMeasure:
    """Empirical measure of a configuration.

    ``modified=False``: weight 1/(N-1) on each particle (needs N >= 2).
    ``modified=True``: the better-behaved variant with an extra atom of
    mass 1/N at 0 and weight 1/N on each particle.
    """
    n = x.n
    if modified:
        positions = np.concatenate([[0.0], x.positions])
    else:
        if x.n_particles == 0:
            raise ValueError("empirical measure of an empty configuration is undefined; "
                             "use modified=True")
        positions = x.positions
    # uniform weights on an exact rational grid k/m, so that the cumulative
    # weights coincide bitwise with the breakpoints produced by embed_quantile
    m = positions.size
    cum = np.arange(1, m + 1) / m
    keep = np.concatenate([np.diff(positions) > 0, [True]])
    return EmpiricalMeasure(positions[keep], cum[keep])


def gaps(mu: EmpiricalMeasure) -> list[Interval]:
    """Connected components of [0,1] minus the support, left to right.

    Boundary gaps (0, first atom) and (last atom, 1) are included whenever 0
    or 1 is not an atom.  Note the interval list is the same whether or not
    0 and 1 carry atoms; this is the single place fixing that convention.
    """
    pts = mu.positions
    if pts[0] > 0.0:
        pts = np.concatenate([[0.0], pts])
    if pts[-1] < 1.0:
        pts = np.concatenate([pts, [1.0]])
    return [Interval(a, b) for a, b in zip(pts[:-1], pts[1:])]


def wasserstein2(g1: QuantileStep, g2: QuantileStep) -> float:
    """Quadratic Wasserstein distance via the L2 distance of quantiles.

    Exact on step functions: piecewise-constant difference integrated on the
    merged breakpoint grid.
    """
    grid = np.union1d(g1.breakpoints, g2.breakpoints)
    lengths = np.diff(np.concatenate([grid, [1.0]]))
    d = g1(grid) - g2(grid)
    return float(np.sqrt(np.sum(d * d * lengths)))
