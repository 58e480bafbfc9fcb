"""Ordered particle configurations on [0,1].

A configuration is the ordered vector of N-1 particle positions with the
implicit boundary points 0 and 1.  Spacings (the N inter-particle distances
including both boundary segments) are carried alongside the positions when
the producing code can compute them more accurately than ``diff(positions)``;
near the right endpoint the positions lose absolute resolution in double
precision while the spacings keep full relative accuracy.  ``log_spacings``
goes one step further and survives spacings below the smallest positive
double, which genuinely occur under the stationary law at small beta/N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_POS_TOL = 1e-12


@dataclass(frozen=True)
class ParticleConfig:
    """Ordered positions of N-1 particles in [0,1]."""

    positions: np.ndarray
    spacings: np.ndarray | None = None
    log_spacings: np.ndarray | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        if pos.ndim != 1:
            raise ValueError("positions must be a 1-d array")
        if pos.size:
            if not (pos[0] >= -_POS_TOL and pos[-1] <= 1 + _POS_TOL):
                raise ValueError("positions must lie in [0,1]")
            if np.any(np.diff(pos) < -_POS_TOL):
                raise ValueError("positions must be nondecreasing")
        for name in ("spacings", "log_spacings"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != (pos.size + 1,):
                    raise ValueError(f"{name} must have length N = n_particles+1")
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    @property
    def n_particles(self) -> int:
        return self.positions.size

    @property
    def n(self) -> int:
        """System size N (positions plus one)."""
        return self.positions.size + 1

    def with_boundaries(self) -> np.ndarray:
        """Positions including the fixed endpoints x^0 = 0, x^N = 1."""
        return np.concatenate([[0.0], self.positions, [1.0]])

    def spacing_array(self) -> np.ndarray:
        """The N spacings; falls back to differencing the positions."""
        if self.spacings is not None:
            return self.spacings
        return np.diff(self.with_boundaries())

    def log_spacing_array(self) -> np.ndarray:
        """Log spacings; exact zeros map to -inf."""
        if self.log_spacings is not None:
            return self.log_spacings
        with np.errstate(divide="ignore"):
            return np.log(self.spacing_array())

    @classmethod
    def from_spacings(cls, spacings: np.ndarray,
                      log_spacings: np.ndarray | None = None) -> "ParticleConfig":
        spacings = np.asarray(spacings, dtype=float)
        if spacings.size < 1 or np.any(spacings < 0):
            raise ValueError("need N >= 1 nonnegative spacings")
        pos = np.minimum(np.cumsum(spacings[:-1]), 1.0)
        return cls(pos, spacings=spacings, log_spacings=log_spacings)

    def __eq__(self, other):
        if not isinstance(other, ParticleConfig):
            return NotImplemented
        return np.array_equal(self.positions, other.positions)

    def __hash__(self):
        return hash(self.positions.tobytes())


def serialize_config(config: ParticleConfig) -> str:
    """One line per config: comma-separated positions (shortest round-trip)."""
    return ",".join(repr(float(v)) for v in config.positions)


def parse_config(line: str) -> ParticleConfig:
    line = line.strip()
    if not line:
        return ParticleConfig(np.empty(0))
    return ParticleConfig(np.array([float(tok) for tok in line.split(",")]))
