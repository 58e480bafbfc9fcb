"""Simulation parameters and reproducible random-stream derivation."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class Scheme(enum.Enum):
    """Dynamics scheme for the particle system."""

    BALL_WALK = "ball_walk"
    REGULARIZED_SDE = "regularized_sde"
    # Exact conditioned-ball kernel by global rejection.  Only practical for
    # small N / large epsilon; kept as a cross-check for the Metropolis chain.
    EXACT_BALL_WALK = "exact_ball_walk"


@dataclass(frozen=True)
class SimParams:
    """Parameters of one particle-system run.

    ``n`` is the system size N (N-1 interior particles), ``beta`` the
    inverse-temperature-like parameter of the stationary law, ``epsilon``
    the ball-walk proposal radius, ``dt`` the microscopic Euler step
    (defaults to epsilon**2 so both schemes advance comparable microscopic
    time per step), ``delta_reg`` the drift regularization and ``horizon``
    the macroscopic run time.
    """

    n: int
    beta: float
    epsilon: float = 0.05
    dt: float | None = None
    delta_reg: float = 1e-6
    horizon: float = 1.0
    seed: int = 0
    scheme: Scheme = Scheme.BALL_WALK

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.dt is None:
            object.__setattr__(self, "dt", self.epsilon**2)
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.delta_reg < 0:
            raise ValueError(f"delta_reg must be >= 0, got {self.delta_reg}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")

    @property
    def drift_coef(self) -> float:
        """Coefficient beta/N - 1 multiplying the pairwise 1/spacing drift."""
        return self.beta / self.n - 1.0


def replica_rng(seed: int, replica: int = 0) -> np.random.Generator:
    """Independent generator for one replica, reproducible from (seed, replica)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replica,)))


def block_rngs(rng: np.random.Generator, n_blocks: int) -> list[np.random.Generator]:
    """Split a generator into per-block streams with a fixed reduction order."""
    return rng.spawn(n_blocks)
