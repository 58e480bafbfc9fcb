"""Operator command line: sample, simulate, verify, sweep.

Configuration is a flat INI file with one section per command, e.g.::

    [sample]
    n = 4
    beta = 1.0
    count = 1000
    seed = 7

Every command is deterministic given (config, seed): re-runs produce
byte-identical CSVs.  Exit status 0 on success, 1 when a verification
suite fails, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import configparser
import inspect
import sys
from pathlib import Path

from . import __version__
from .config import serialize_config
from .corpus import parse_cylinder, phi_corpus, quantile_corpus
from .errors import StepSizeError
from .forms import divergence_error, projection_sweep
from .params import Scheme, SimParams, replica_rng
from .sampling import sample_spacing_batch
from .verify import SUITES

_SCHEMES = {
    "ballwalk": Scheme.BALL_WALK,
    "ball_walk": Scheme.BALL_WALK,
    "regularizedsde": Scheme.REGULARIZED_SDE,
    "regularized_sde": Scheme.REGULARIZED_SDE,
    "exactballwalk": Scheme.EXACT_BALL_WALK,
    "exact_ball_walk": Scheme.EXACT_BALL_WALK,
}

# spec'd operator suites; 'martingale' covers both the increment test and QV
_SUITE_GROUPS = {
    "stationarity": ["stationarity"],
    "generator": ["generator"],
    "ibp": ["ibp"],
    "divergence": ["divergence"],
    "projection": ["projection"],
    "martingale": ["martingale", "qv"],
    "gibbs": ["gibbs"],
    "regimes": ["regimes"],
    "all": ["stationarity", "generator", "ibp", "divergence", "projection",
            "martingale", "qv", "gibbs", "regimes"],
}

# scaled-down defaults for interactive runs; the acceptance tests call the
# same suites at full scale
_CLI_DEFAULTS = {
    "stationarity": dict(n_samples=20_000, chain_replicas=10_000, chain_burn_in=32),
    "generator": dict(n_configs=20_000),
    "ibp": dict(samples=200_000),
    "divergence": dict(),
    "projection": dict(samples=20_000),
    "martingale": dict(replicas=50, horizon=0.02),
    "qv": dict(replicas=30, horizon=0.03),
    "gibbs": dict(),
    "regimes": dict(count=20_000),
}


class CliError(Exception):
    """Usage or configuration error: exit code 2."""


def _read_config(path: str | None) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    if path is not None:
        if not Path(path).is_file():
            raise CliError(f"config file not found: {path}")
        parser.read(path)
    return parser


def _get(section, key: str, cast, default=None, required: bool = False):
    if key not in section:
        if required:
            raise CliError(f"missing config field '{key}'")
        return default
    raw = section[key]
    try:
        return cast(raw)
    except (TypeError, ValueError):
        raise CliError(f"malformed config field '{key}': {raw!r}") from None


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _params_comment(pairs) -> str:
    return " ".join(f"{k}={v}" for k, v in pairs)


def cmd_sample(args) -> int:
    cfg = _read_config(args.config)
    section = cfg["sample"] if cfg.has_section("sample") else {}
    n = _get(section, "n", int, required=True)
    beta = _get(section, "beta", float, required=True)
    count = _get(section, "count", int, required=True)
    seed = args.seed if args.seed is not None else _get(section, "seed", int, 0)
    if n < 1 or count < 0 or beta <= 0:
        raise CliError("need n >= 1, beta > 0, count >= 0 (fields 'n'/'beta'/'count')")
    rng = replica_rng(seed)
    batch = sample_spacing_batch(n, beta, count, rng)
    out = _out_dir(args) / "configs.csv"
    with open(out, "w") as fh:
        fh.write("# " + _params_comment([("command", "sample"), ("n", n),
                                         ("beta", beta), ("count", count),
                                         ("seed", seed),
                                         ("version", __version__)]) + "\n")
        fh.write(",".join(f"x{i}" for i in range(1, n)) + "\n")
        for c in batch.configs():
            fh.write(serialize_config(c) + "\n")
    print(f"wrote {out}")
    return 0


def _sim_params(section, seed) -> tuple[SimParams, float, int]:
    n = _get(section, "n", int, required=True)
    beta = _get(section, "beta", float, required=True)
    scheme_name = _get(section, "scheme", str, "ball_walk").strip().lower()
    if scheme_name not in _SCHEMES:
        raise CliError(f"malformed config field 'scheme': {scheme_name!r} "
                       f"(known: {sorted(set(_SCHEMES))})")
    horizon = _get(section, "horizon", float, required=True)
    record_every = _get(section, "record_every", float, required=True)
    replicas = _get(section, "replicas", int, 1)
    epsilon = _get(section, "epsilon", float, 0.05)
    dt = _get(section, "dt", float, None)
    delta_reg = _get(section, "delta_reg", float, 1e-6)
    try:
        params = SimParams(n=n, beta=beta, epsilon=epsilon, dt=dt,
                           delta_reg=delta_reg, horizon=horizon, seed=seed,
                           scheme=_SCHEMES[scheme_name])
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return params, record_every, replicas


def cmd_simulate(args) -> int:
    cfg = _read_config(args.config)
    if not cfg.has_section("simulate"):
        raise CliError("missing config section 'simulate'")
    section = cfg["simulate"]
    seed = args.seed if args.seed is not None else _get(section, "seed", int, 0)
    params, record_every, replicas = _sim_params(section, seed)
    out = _out_dir(args)
    from .dynamics import run_replicas
    try:
        paths = run_replicas(params, record_every, replicas, jobs=args.jobs)
    except StepSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    comment = _params_comment([
        ("command", "simulate"), ("n", params.n), ("beta", params.beta),
        ("scheme", params.scheme.value), ("epsilon", params.epsilon),
        ("dt", params.dt), ("delta_reg", params.delta_reg),
        ("horizon", params.horizon), ("record_every", record_every),
        ("replicas", replicas), ("seed", seed), ("version", __version__)])
    for k, path in enumerate(paths):
        fname = out / f"path_rep{k:03d}.csv"
        with open(fname, "w") as fh:
            path.write_csv(fh, header_comment=comment + f" replica={k}")
    with open(out / "manifest.txt", "w") as fh:
        fh.write(f"wasserstein-particles {__version__}\n")
        for item in comment.split(" "):
            fh.write(item + "\n")
        for k, path in enumerate(paths):
            acc = "" if path.acceptance_rate is None else \
                f" acceptance_rate={path.acceptance_rate!r}"
            fh.write(f"path_rep{k:03d}.csv records={path.n_records}{acc}\n")
    print(f"wrote {replicas} path file(s) and manifest to {out}")
    return 0


def cmd_verify(args) -> int:
    if args.suite not in _SUITE_GROUPS:
        print(f"error: unknown suite {args.suite!r} "
              f"(choose from {sorted(_SUITE_GROUPS)})", file=sys.stderr)
        return 2
    cfg = _read_config(args.config)
    overrides = dict(cfg["verify"]) if cfg.has_section("verify") else {}
    out = _out_dir(args)
    results = []
    for name in _SUITE_GROUPS[args.suite]:
        fn = SUITES[name]
        kwargs = dict(_CLI_DEFAULTS.get(name, {}))
        sig = inspect.signature(fn)
        for key in overrides:
            if key in sig.parameters:
                default = sig.parameters[key].default
                if isinstance(default, bool) or not isinstance(default, (int, float)):
                    continue  # only scalar knobs are file-overridable
                cast = int if isinstance(default, int) else float
                kwargs[key] = _get(overrides, key, cast)
        if args.seed is not None and "seed" in sig.parameters:
            kwargs["seed"] = args.seed
        if "jobs" in sig.parameters:
            kwargs["jobs"] = args.jobs
        results.extend(fn(**kwargs))
    report = out / "report.csv"
    with open(report, "w") as fh:
        fh.write("# " + _params_comment([("command", "verify"),
                                         ("suite", args.suite),
                                         ("version", __version__)]) + "\n")
        fh.write("replica,quantity,value,stderr\n")
        for res in results:
            for replica, quantity, value, stderr in res.rows:
                fh.write(f"{replica},{quantity},{float(value)!r},"
                         f"{'' if stderr == '' else repr(float(stderr))}\n")
    summary = out / "summary.txt"
    with open(summary, "w") as fh:
        for res in results:
            fh.write(res.line() + "\n")
    ok = all(res.passed for res in results)
    for res in results:
        print(res.line())
    print(f"wrote {report} and {summary}")
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    cfg = _read_config(args.config)
    section = dict(cfg["sweep"]) if cfg.has_section("sweep") else {}
    beta = _get(section, "beta", float, 1.0)
    samples = _get(section, "samples", int, 20_000)
    seed = args.seed if args.seed is not None else _get(section, "seed", int, 0)
    ns = tuple(2**k for k in range(4, 13))
    out = _out_dir(args) / "sweeps.csv"
    rng = replica_rng(seed)
    with open(out, "w") as fh:
        fh.write("# " + _params_comment([("command", "sweep"), ("beta", beta),
                                         ("samples", samples), ("seed", seed),
                                         ("version", __version__)]) + "\n")
        fh.write("N,quantity,estimate,stderr\n")
        for gi, g in enumerate(quantile_corpus()):
            for phi in phi_corpus():
                for n in ns:
                    err = divergence_error(g, phi, beta, n)
                    fh.write(f"{n},vsweep_g{gi}_{phi.name},{err!r},\n")
        for u_spec in ("cos:1", "identity^2", "exp"):
            u = parse_cylinder(u_spec)
            for n, est in projection_sweep(u, (4, 8, 16, 32, 64, 128), beta,
                                           samples, rng):
                fh.write(f"{n},projection_{u_spec},{est.value!r},{est.stderr!r}\n")
    print(f"wrote {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wparticles",
        description="Interacting particle approximation toolkit: sampling, "
                    "dynamics, and verification suites.")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--jobs", type=int, default=1,
                        help="replica-level parallelism")
    parser.add_argument("--out-dir", default=".",
                        help="output directory (created if needed)")
    sub = parser.add_subparsers(dest="command")
    p_sample = sub.add_parser("sample", help="draw exact stationary configurations")
    p_sample.add_argument("config", nargs="?", default=None)
    p_sim = sub.add_parser("simulate", help="run dynamics replicas")
    p_sim.add_argument("config", nargs="?", default=None)
    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("suite")
    p_ver.add_argument("config", nargs="?", default=None)
    p_sweep = sub.add_parser("sweep", help="emit convergence sweep CSVs")
    p_sweep.add_argument("config", nargs="?", default=None)
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    handlers = {"sample": cmd_sample, "simulate": cmd_simulate,
                "verify": cmd_verify, "sweep": cmd_sweep}
    try:
        return handlers[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
