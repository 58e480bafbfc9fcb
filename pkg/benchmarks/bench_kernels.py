"""Benchmark the compiled kernels against the pure-Python fallback.

Run:  python benchmarks/bench_kernels.py [--steps 20000]

Both backends consume identical random blocks and produce bitwise-identical
states; the table reports steps/second and the speedup of the compiled path.
"""

import argparse
import time

import numpy as np

from wasserstein_particles.kernels import get_backends


def bench_ball_walk(mod, n, steps, rng):
    sp = rng.dirichlet(np.ones(n))
    log_sp = np.log(sp)
    uniforms = rng.random((steps, n))
    prop = np.empty(n)
    plog = np.empty(n)
    t0 = time.perf_counter()
    mod.ball_walk_chunk(sp, log_sp, 0.5 / n, 1.0 / n - 1.0, uniforms, prop, plog)
    return steps / (time.perf_counter() - t0)


def bench_sde(mod, n, steps, rng):
    x = np.sort(rng.random(n - 1))
    normals = rng.standard_normal((steps, n - 1))
    t0 = time.perf_counter()
    status = mod.sde_chunk(x, np.empty(n - 1), 1e-6, 1e-3, 1.0 / n - 1.0, normals)
    assert status == -1
    return steps / (time.perf_counter() - t0)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=20_000)
    args = parser.parse_args()
    backends = get_backends()
    if len(backends) < 2:
        print("compiled extension not available; benchmarking pure backend only")
    print(f"{'kernel':12s} {'N':>4s} " +
          " ".join(f"{name + ' steps/s':>18s}" for name, _ in backends) +
          ("  speedup" if len(backends) == 2 else ""))
    for kernel, bench in (("ball_walk", bench_ball_walk), ("sde", bench_sde)):
        for n in (8, 64, 256):
            rates = []
            for name, mod in backends:
                rng = np.random.default_rng(12345)  # same draws per backend
                rates.append(bench(mod, n, args.steps, rng))
            line = f"{kernel:12s} {n:4d} " + " ".join(f"{r:18.0f}" for r in rates)
            if len(rates) == 2:
                line += f"  {rates[0] / rates[1]:7.1f}x"
            print(line)


if __name__ == "__main__":
    main()
