"""Benchmark harness: ``dais-bench {run,rmse,monitor,logistic}``.

Exit codes: 0 success, 2 configuration or input error, 3 runtime failure.
The default worker-thread count comes from ``DAIS_NUM_THREADS``.
"""

import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

from . import _io
from .baselines import NgviConfig, run_ngvi, run_plain_ais
from .core import DaisConfig, run_dais
from .data import load_logistic_csv, synthetic_logistic_data
from .errors import ConfigError, DaisError, ParseError
from .experiments import RMSE_COLUMNS, control_variate_rmse, default_gamma_grid, loglog_slopes, monitor_run
from .gaussian import gaussian_new, standard_normal
from .targets import (
    banana_target,
    correlated_gaussian_target,
    laplace_init,
    logistic_target,
    mixture_target,
    sine_2d_target,
)

METHODS = ("dais", "ngvi", "plain-ais")
INIT_KINDS = ("standard-normal", "laplace", "explicit")
SUMMARY_KEYS = ("method", "target", "config", "iterations", "stopped_reason", "wall_seconds")


def _logistic_from_spec(spec, base_dir):
    if "synthetic" in spec:
        syn = spec["synthetic"]
        data, _ = synthetic_logistic_data(int(syn["n"]), int(syn["d"]), int(syn.get("seed", 0)))
        return logistic_target(data)
    if "csv" not in spec:
        raise ConfigError("logistic target needs 'csv' or 'synthetic'")
    path = os.path.join(base_dir, spec["csv"])
    if not os.path.exists(path):
        raise ConfigError(f"data file not found: {path}")
    data = load_logistic_csv(
        path,
        labels_first_column=spec.get("labels_first_column", True),
        has_header=spec.get("has_header", False),
        add_intercept=spec.get("add_intercept", False),
    )
    return logistic_target(data)


TARGETS = {
    "banana": lambda spec, base: banana_target(),
    "mixture": lambda spec, base: mixture_target(),
    "corr-gauss": lambda spec, base: correlated_gaussian_target(
        spec.get("d", 10), spec.get("mean_value", 1.0), spec.get("base", 0.9), spec.get("diag_boost", 0.1)
    ),
    "sine2d": lambda spec, base: sine_2d_target(spec.get("sigma", 0.1)),
    "logistic": _logistic_from_spec,
}


def build_target(spec, base_dir="."):
    if isinstance(spec, str):
        spec = {"name": spec}
    name = spec.get("name")
    if name not in TARGETS:
        raise ConfigError(f"unknown target {name!r}; valid targets: {', '.join(sorted(TARGETS))}")
    try:
        return TARGETS[name](spec, base_dir)
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, DaisError):
            raise
        raise ConfigError(f"bad parameters for target {name!r}: {exc}") from None


def build_initial(spec, target, base_dir="."):
    spec = spec or {"kind": "standard-normal"}
    kind = spec.get("kind", "standard-normal")
    if kind == "standard-normal":
        return standard_normal(target.dim)
    if kind == "laplace":
        return laplace_init(
            target,
            np.zeros(target.dim),
            max_newton_iters=spec.get("max_newton_iters", 50),
            grad_tol=spec.get("grad_tol", 1e-8),
        )
    if kind == "explicit":
        paths = [os.path.join(base_dir, spec.get(k, "")) for k in ("mean_file", "cov_file")]
        for p in paths:
            if not os.path.isfile(p):
                raise ConfigError(f"init file not found: {p}")
        mean = _io.read_matrix_csv(paths[0]).reshape(-1)
        cov = _io.read_matrix_csv(paths[1])
        return gaussian_new(mean, cov)
    raise ConfigError(f"unknown init kind {kind!r}; valid kinds: {', '.join(INIT_KINDS)}")


def _method_config(method, settings, seed, threads):
    cls = NgviConfig if method == "ngvi" else DaisConfig
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(settings) - names
    if unknown:
        raise ConfigError(f"unknown settings for {method}: {', '.join(sorted(unknown))}")
    kwargs = dict(settings)
    if seed is not None:
        kwargs["seed"] = seed
    if threads is not None:
        kwargs["n_threads"] = threads
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def run_method(method, initial, target, config):
    if method == "dais":
        return run_dais(initial, target, config)
    if method == "plain-ais":
        return run_plain_ais(initial, target, config)
    return run_ngvi(initial, target, config)


def _config_echo(config):
    out = dataclasses.asdict(config)
    out.pop("n_threads", None)
    return out


def write_run_outputs(out_dir, report):
    d = report.final.dim
    header = ["t", "gamma", "ess", "elbo", "pd_repairs"] + [f"mu_{i}" for i in range(d)] + [f"var_{i}" for i in range(d)]
    rows = [
        [r.t, r.gamma, r.ess, r.elbo, r.pd_repairs, *r.mean, *np.diag(r.covariance)] for r in report.records
    ]
    _io.write_csv(os.path.join(out_dir, "trace.csv"), header, rows)
    _io.write_csv(os.path.join(out_dir, "final_mean.csv"), ["mean"], [[v] for v in report.final.mean])
    _io.write_csv(os.path.join(out_dir, "final_cov.csv"), [f"c{i}" for i in range(d)], report.final.covariance)


def summary(method, target_name, config_echo, report, wall):
    return {
        "method": method,
        "target": target_name,
        "config": config_echo,
        "iterations": report.iterations,
        "stopped_reason": str(report.stopped_reason),
        "wall_seconds": wall,
    }


def cmd_run(args):
    path = args.config
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    base_dir = os.path.dirname(os.path.abspath(path))
    method = cfg.get("method", "dais")
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; valid methods: {', '.join(METHODS)}")
    target_spec = cfg.get("target")
    if target_spec is None:
        raise ConfigError("config needs a 'target'")
    seed = args.seed if args.seed is not None else cfg.get("seed")
    config = _method_config(method, cfg.get("settings", {}), seed, args.threads)
    out_dir = args.output or os.path.join(base_dir, cfg.get("output_dir", "out"))
    target = build_target(target_spec, base_dir)
    initial = build_initial(cfg.get("init"), target, base_dir)

    start = time.perf_counter()
    report = run_method(method, initial, target, config)
    wall = time.perf_counter() - start

    write_run_outputs(out_dir, report)
    echo = {
        "settings": _config_echo(config),
        "init": cfg.get("init") or {"kind": "standard-normal"},
        "target_spec": target_spec,
    }
    name = target_spec if isinstance(target_spec, str) else target_spec.get("name")
    _io.write_json(os.path.join(out_dir, "summary.json"), summary(method, name, echo, report, wall))
    return 0


def _parse_gammas(text):
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise ConfigError(f"bad gamma list {text!r}") from None


def cmd_rmse(args):
    if min(args.d, args.samples, args.replications) < 1:
        raise ConfigError("d, samples and replications must be positive")
    gammas = _parse_gammas(args.gammas) if args.gammas else default_gamma_grid(args.n_gammas)
    if len(gammas) == 0 or np.any(gammas <= 0) or np.any(gammas > 1):
        raise ConfigError("gammas must lie in (0, 1]")
    table = control_variate_rmse(args.d, args.samples, args.replications, gammas, args.seed or 0, args.threads)
    os.makedirs(args.output, exist_ok=True)
    _io.write_csv(os.path.join(args.output, "rmse.csv"), RMSE_COLUMNS, table)
    slopes = loglog_slopes(table) if len(gammas) > 1 else None
    if slopes is not None:
        _io.write_json(os.path.join(args.output, "slopes.json"), slopes)
    return 0


def cmd_monitor(args):
    if min(args.samples, args.iters) < 1:
        raise ConfigError("samples and iters must be positive")
    try:
        rows = monitor_run(args.target, args.samples, args.c, args.seed or 0, args.iters, args.n_ess, args.threads)
    except ValueError as exc:
        if isinstance(exc, DaisError):
            raise
        raise ConfigError(str(exc)) from None
    _io.write_csv(os.path.join(args.output, "monitor.csv"), ["t", "gamma", "neg_elbo"], [[int(r[0]), r[1], r[2]] for r in rows])
    return 0


def cmd_logistic(args):
    if args.synthetic:
        n, d, data_seed = args.synthetic
        data, _ = synthetic_logistic_data(n, d, data_seed)
        target_name = f"logistic-synthetic-{n}x{d}-seed{data_seed}"
    else:
        if not os.path.isfile(args.csv):
            raise ConfigError(f"data file not found: {args.csv}")
        data = load_logistic_csv(args.csv, not args.labels_last, args.header, args.intercept)
        target_name = f"logistic-csv:{os.path.basename(args.csv)}"
    target = logistic_target(data)
    overrides = {
        k: v
        for k, v in {
            "s_count": args.s_count,
            "n_ess": args.n_ess,
            "robustness_c": args.c,
            "max_iters": args.max_iters,
        }.items()
        if v is not None
    }
    if args.method == "ngvi":
        overrides = {{"robustness_c": "step_size"}.get(k, k): v for k, v in overrides.items() if k != "n_ess"}
    config = _method_config(args.method, overrides, args.seed, args.threads)

    start = time.perf_counter()
    initial = laplace_init(target, np.zeros(target.dim))
    report = run_method(args.method, initial, target, config)
    wall = time.perf_counter() - start

    final = report.final
    sd = np.sqrt(np.diag(final.covariance))
    _io.write_csv(
        os.path.join(args.output, "moments.csv"),
        ["index", "mean", "sd"],
        [[i, m, s] for i, (m, s) in enumerate(zip(final.mean, sd))],
    )
    _io.write_csv(os.path.join(args.output, "final_cov.csv"), [f"c{i}" for i in range(final.dim)], final.covariance)
    echo = {"settings": _config_echo(config), "init": {"kind": "laplace"}}
    _io.write_json(os.path.join(args.output, "summary.json"), summary(args.method, target_name, echo, report, wall))
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="base random seed")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: $DAIS_NUM_THREADS or 1)")

    parser = argparse.ArgumentParser(prog="dais-bench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run one method from a JSON experiment config")
    p.add_argument("config")
    p.add_argument("--output", default=None, help="output directory (overrides output_dir in the config)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("rmse", parents=[common], help="control-variate RMSE versus damping")
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--replications", type=int, default=100)
    p.add_argument("--gammas", default=None, help="comma-separated damping values")
    p.add_argument("--n-gammas", type=int, default=7, help="log-spaced points on [1e-3, 1] when --gammas is not given")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_rmse)

    p = sub.add_parser("monitor", parents=[common], help="track gamma and -ELBO over iterations")
    p.add_argument("--target", choices=("sine2d", "corr-gauss-100"), required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--n-ess", type=float, default=1_000)
    p.add_argument("--c", type=float, default=None, help="robustness constant (default 0.1 sine2d, 0.3 corr-gauss-100)")
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("logistic", parents=[common], help="Bayesian logistic regression from a Laplace start")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--csv", help="numeric CSV with a label column")
    src.add_argument("--synthetic", nargs=3, type=int, metavar=("N", "D", "DATA_SEED"))
    p.add_argument("--labels-last", action="store_true")
    p.add_argument("--header", action="store_true")
    p.add_argument("--intercept", action="store_true")
    p.add_argument("--method", choices=METHODS, default="dais")
    p.add_argument("--s-count", type=int, default=None)
    p.add_argument("--n-ess", type=float, default=None)
    p.add_argument("--c", type=float, default=None, help="robustness constant (step size for ngvi)")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_logistic)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"dais-bench: error: {exc}", file=sys.stderr)
        return 2
    except DaisError as exc:
        print(f"dais-bench: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
