"""The two dynamics schemes on the ordered simplex, and path recording.

Macroscopic time t corresponds to microscopic time N*t.  One ball-walk step
advances microscopic time by epsilon**2 (so a macroscopic interval dt_macro
maps to floor(N*dt_macro/epsilon**2) steps); one Euler step advances it by
dt (ceil(N*dt_macro/dt) steps per interval).

The ball walk is a Metropolis chain whose proposal is uniform on the
l-infinity ball of radius epsilon and whose acceptance ratio is the spacing
density ratio; its invariant law is exactly the stationary configuration
law.  The exact conditioned-ball kernel (stationary law restricted to the
ball around the current state) is available as a rejection sampler for
small-N cross checks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import ParticleConfig
from .errors import StepSizeError
from .kernels import ball_walk_chunk, sde_chunk, sde_chunk_qv
from .params import Scheme, SimParams, replica_rng
from .sampling import sample_config, sample_spacing_batch

_CHUNK = 8192
_GRID_EPS = 1e-9  # tolerance when mapping times to integer step counts


@dataclass(frozen=True)
class SimulationPath:
    """States recorded along one run, on the macroscopic clock."""

    times: np.ndarray
    states: list[ParticleConfig]
    params: SimParams
    acceptance_rate: float | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "times", t)
        if t.ndim != 1 or t.size != len(self.states):
            raise ValueError("times and states must have equal length")
        if t.size == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing and start at 0")

    @property
    def n_records(self) -> int:
        return self.times.size

    def positions_matrix(self) -> np.ndarray:
        """(n_records, N-1) matrix of recorded positions."""
        return np.array([s.positions for s in self.states])

    def write_csv(self, fileobj, header_comment: str | None = None):
        m = self.params.n - 1
        if header_comment:
            fileobj.write(f"# {header_comment}\n")
        fileobj.write("time," + ",".join(f"x{i}" for i in range(1, m + 1)) + "\n")
        for t, s in zip(self.times, self.states):
            row = ",".join(repr(float(v)) for v in s.positions)
            ts = repr(float(t))
            fileobj.write(f"{ts},{row}\n" if m else f"{ts}\n")


class _BallWalkState:
    """Mutable spacing-space chain state over the kernel."""

    def __init__(self, config: ParticleConfig):
        self.sp = config.spacing_array().copy()
        self.log_sp = config.log_spacing_array().copy()
        self._prop = np.empty_like(self.sp)
        self._plog = np.empty_like(self.sp)
        self.accepted = 0
        self.steps = 0

    def run(self, steps: int, eps: float, coef: float, rng: np.random.Generator):
        n = self.sp.shape[0]
        done = 0
        while done < steps:
            k = min(_CHUNK, steps - done)
            uniforms = rng.random((k, n))
            self.accepted += ball_walk_chunk(self.sp, self.log_sp, eps, coef,
                                             uniforms, self._prop, self._plog)
            done += k
        self.steps += steps

    def config(self) -> ParticleConfig:
        return ParticleConfig.from_spacings(self.sp.copy(), self.log_sp.copy())


class _SdeState:
    """Mutable position-space Euler state over the kernel."""

    def __init__(self, config: ParticleConfig):
        self.x = config.positions.copy()
        self._y = np.empty_like(self.x)
        self.steps = 0

    def run(self, steps: int, dt: float, delta: float, coef: float,
            rng: np.random.Generator):
        m = self.x.shape[0]
        done = 0
        while done < steps:
            k = min(_CHUNK, steps - done)
            normals = rng.standard_normal((k, m))
            status = sde_chunk(self.x, self._y, dt, delta, coef, normals)
            if status >= 0:
                raise StepSizeError(dt, step_index=self.steps + done + status)
            done += k
        self.steps += steps

    def config(self) -> ParticleConfig:
        return ParticleConfig(self.x.copy())


class _SdeQvState(_SdeState):
    """Euler state that accumulates step-resolution quadratic variation of
    the observable (1 + sum cos(omega x_i))/N (the modified empirical mean
    of cos(omega .))."""

    def __init__(self, config: ParticleConfig, omega: float):
        super().__init__(config)
        self.omega = omega
        n = self.x.shape[0] + 1
        self.qv_io = np.array([0.0, (1.0 + np.cos(omega * self.x).sum()) / n])

    def run(self, steps: int, dt: float, delta: float, coef: float,
            rng: np.random.Generator):
        m = self.x.shape[0]
        done = 0
        while done < steps:
            k = min(_CHUNK, steps - done)
            normals = rng.standard_normal((k, m))
            status = sde_chunk_qv(self.x, self._y, dt, delta, coef, normals,
                                  self.omega, self.qv_io)
            if status >= 0:
                raise StepSizeError(dt, step_index=self.steps + done + status)
            done += k
        self.steps += steps


def simulate_path_microqv(x0: ParticleConfig, params: SimParams,
                          record_every: float, rng: np.random.Generator,
                          wavenumber: int = 1) -> tuple[SimulationPath, np.ndarray]:
    """Euler path plus per-interval quadratic variation of the cos(k pi .)
    observable accumulated at the integration step (not the recording grid),
    where the realized sum concentrates on its compensator."""
    if params.scheme is not Scheme.REGULARIZED_SDE:
        raise ValueError("step-resolution QV is only defined for the Euler scheme")
    n_records = int(math.floor(params.horizon / record_every + _GRID_EPS))
    times = np.arange(n_records + 1) * record_every
    states = [x0]
    state = _SdeQvState(x0, wavenumber * math.pi)
    per = steps_per_interval(params, record_every)
    micro_qv = np.empty(n_records)
    for k in range(n_records):
        before = state.qv_io[0]
        state.run(per, params.dt, params.delta_reg, params.drift_coef, rng)
        micro_qv[k] = state.qv_io[0] - before
        states.append(state.config())
    return SimulationPath(times, states, params), micro_qv


def ball_walk_step(x: ParticleConfig, params: SimParams,
                   rng: np.random.Generator) -> ParticleConfig:
    """One Metropolis step; returns the new state (== x on rejection)."""
    state = _BallWalkState(x)
    state.run(1, params.epsilon, params.drift_coef, rng)
    return state.config()


def sde_step(x: ParticleConfig, params: SimParams,
             rng: np.random.Generator) -> ParticleConfig:
    """One regularized Euler step with reflection and re-sorting."""
    state = _SdeState(x)
    state.run(1, params.dt, params.delta_reg, params.drift_coef, rng)
    return state.config()


def exact_ball_step(x: ParticleConfig, params: SimParams,
                    rng: np.random.Generator,
                    max_tries: int = 1_000_000) -> ParticleConfig:
    """One step of the exact conditioned-ball kernel, by rejection.

    Draws stationary configurations until one lands within l-infinity
    distance epsilon of the current positions.  Acceptance degenerates
    quickly as epsilon shrinks or N grows; meant for small-N cross checks
    of the Metropolis chain.
    """
    if x.n_particles == 0:
        return sample_config(params, rng)
    tries = 0
    batch = 256
    while tries < max_tries:
        k = min(batch, max_tries - tries)
        cand = sample_spacing_batch(params.n, params.beta, k, rng)
        pos = cand.positions()
        hit = np.nonzero(np.max(np.abs(pos - x.positions), axis=1) <= params.epsilon)[0]
        if hit.size:
            j = int(hit[0])
            return ParticleConfig(pos[j], spacings=cand.spacings[j],
                                  log_spacings=None if cand.log_spacings is None
                                  else cand.log_spacings[j])
        tries += k
    raise RuntimeError(
        f"exact ball kernel: no acceptance in {max_tries} draws "
        f"(N={params.n}, epsilon={params.epsilon}); use the Metropolis scheme")


def stationary_start(params: SimParams, rng: np.random.Generator) -> ParticleConfig:
    """Draw the initial state from the invariant law.

    The staircase embedding of this draw has the law of the limiting initial
    condition restricted to the N-point grid.
    """
    return sample_config(params, rng)


def steps_per_interval(params: SimParams, record_every: float) -> int:
    """Number of microscopic steps per macroscopic recording interval."""
    micro = params.n * record_every
    if params.scheme is Scheme.REGULARIZED_SDE:
        return int(math.ceil(micro / params.dt - _GRID_EPS))
    return int(math.floor(micro / params.epsilon**2 + _GRID_EPS))


def simulate_path(x0: ParticleConfig, params: SimParams, record_every: float,
                  rng: np.random.Generator) -> SimulationPath:
    """Run one replica, recording states at multiples of record_every.

    Reproducible: the path is a deterministic function of (x0, params, rng
    stream).  Propagates StepSizeError from the Euler scheme.
    """
    if record_every <= 0:
        raise ValueError("record_every must be positive")
    if params.horizon > 0 and record_every > params.horizon + _GRID_EPS:
        raise ValueError("record_every must not exceed the horizon")
    n_records = int(math.floor(params.horizon / record_every + _GRID_EPS))
    times = np.arange(n_records + 1) * record_every
    states = [x0]
    acceptance = None
    if n_records > 0:
        per = steps_per_interval(params, record_every)
        if params.scheme is Scheme.REGULARIZED_SDE:
            state = _SdeState(x0)
            for _ in range(n_records):
                state.run(per, params.dt, params.delta_reg, params.drift_coef, rng)
                states.append(state.config())
        elif params.scheme is Scheme.BALL_WALK:
            state = _BallWalkState(x0)
            for _ in range(n_records):
                state.run(per, params.epsilon, params.drift_coef, rng)
                states.append(state.config())
            acceptance = state.accepted / max(state.steps, 1)
        elif params.scheme is Scheme.EXACT_BALL_WALK:
            cur = x0
            for _ in range(n_records):
                for _step in range(per):
                    cur = exact_ball_step(cur, params, rng)
                states.append(cur)
        else:  # pragma: no cover
            raise ValueError(f"unknown scheme {params.scheme}")
    return SimulationPath(times, states, params, acceptance_rate=acceptance)


def _run_one_replica(args):
    params, record_every, replica, wavenumber = args
    rng = replica_rng(params.seed, replica)
    x0 = stationary_start(params, rng)
    try:
        if wavenumber is None:
            return replica, simulate_path(x0, params, record_every, rng), None
        return replica, simulate_path_microqv(x0, params, record_every, rng,
                                              wavenumber), None
    except StepSizeError as exc:
        exc.replica = replica
        return replica, None, exc


def _replica_map(params, record_every, n_replicas, jobs, wavenumber):
    tasks = [(params, record_every, k, wavenumber) for k in range(n_replicas)]
    if jobs > 1 and n_replicas > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one_replica, tasks, chunksize=1))
    else:
        results = [_run_one_replica(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    for _, out, err in results:
        if err is not None:
            raise err
    return [out for _, out, _ in results]


def run_replicas(params: SimParams, record_every: float, n_replicas: int,
                 jobs: int = 1) -> list[SimulationPath]:
    """Independent stationary-start replicas, merged by replica index.

    Replica k uses the stream derived from (params.seed, k), so results do
    not depend on ``jobs``.
    """
    return _replica_map(params, record_every, n_replicas, jobs, None)


def run_replicas_microqv(params: SimParams, record_every: float,
                         n_replicas: int, wavenumber: int = 1,
                         jobs: int = 1) -> list[tuple[SimulationPath, np.ndarray]]:
    """Stationary-start Euler replicas with step-resolution QV tracking."""
    return _replica_map(params, record_every, n_replicas, jobs, wavenumber)


def stationary_chain_endpoints(params: SimParams, count: int, burn_in: int,
                               rng: np.random.Generator) -> tuple[list[ParticleConfig], float]:
    """Endpoints of ``count`` independent ball-walk chains from exact
    stationary starts, each run for ``burn_in`` steps.

    Endpoint marginals remain exactly stationary (the kernel preserves the
    target), so they feed the same goodness-of-fit suite as exact samples.
    Returns (configs, overall acceptance rate).  Starts and random blocks
    are drawn in batches from the single given stream.
    """
    n = params.n
    coef = params.drift_coef
    out = []
    accepted = 0
    prop = np.empty(n)
    plog = np.empty(n)
    # ~32 MB of uniforms per batch
    batch = max(1, (1 << 22) // max(burn_in * n, 1))
    done = 0
    while done < count:
        k = min(batch, count - done)
        starts = sample_spacing_batch(n, params.beta, k, rng)
        uniforms = rng.random((k, burn_in, n))
        for r in range(k):
            sp = starts.spacings[r].copy()
            log_sp = starts.log_spacings[r].copy()
            accepted += ball_walk_chunk(sp, log_sp, params.epsilon, coef,
                                        uniforms[r], prop, plog)
            out.append(ParticleConfig.from_spacings(sp, log_sp))
        done += k
    return out, accepted / max(count * burn_in, 1)
