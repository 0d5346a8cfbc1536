"""Command line experiment runner.

Exit codes: 0 success, 2 configuration error, 3 solver error, 4 diagnostic
failure (determinant decay flagged by the convergence report).
"""

import argparse
import sys
from dataclasses import replace

from .config import load_config, with_overrides
from .errors import ConfigError, OracleConvergenceError, SingularModelError
from .experiment import run_convergence, run_figures, run_solve, run_sweep, run_table1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_DIAGNOSTIC = 4


def _add_common(parser):
    parser.add_argument("config", help="flat key-value configuration file")
    parser.add_argument("--out", default="drgp_out", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--jobs", type=int, default=1, help="parallel worker cap")
    parser.add_argument("--trace", action="store_true",
                        help="record per-iteration (value, gap) trace")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drgp",
        description="Worst-case covariance games for spectral Gaussian regression",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("solve", "solve one configuration and write its summary"),
        ("table1", "run the nine standard parameter columns"),
        ("figures", "emit correlation, band and sample-path CSV data"),
        ("sweep", "re-solve while varying one configuration key"),
        ("convergence", "solve across truncation levels and report trends"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "sweep":
            p.add_argument("--vary", required=True,
                           help="key=v1,v2,... (e.g. delta_sq=0.01,0.1,1)")
        if name == "convergence":
            p.add_argument("--levels", required=True,
                           help="comma-separated truncation levels, e.g. 50,100,200")

    return parser


def _load(args):
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trace:
        overrides["solver"] = replace(cfg.solver, record_trace=True)
    if overrides:
        solver = overrides.pop("solver", cfg.solver)
        cfg = replace(cfg, solver=solver, **overrides).validate()
    return cfg


def _parse_vary(spec: str):
    if "=" not in spec:
        raise ConfigError(f"--vary expects key=v1,v2,..., got {spec!r}")
    key, raw = spec.split("=", 1)
    key = key.strip()
    numeric_keys = {"alpha", "beta", "delta_sq", "sigma", "kappa", "heat_time"}
    int_keys = {"n_modes", "m", "seed", "grid_points"}
    values = []
    for tok in raw.split(","):
        tok = tok.strip()
        if key in int_keys:
            values.append(int(tok))
        elif key in numeric_keys:
            values.append(float(tok))
        else:
            values.append(tok)
    if not values:
        raise ConfigError("--vary needs at least one value")
    return key, values


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "solve":
            run_solve(cfg, args.out)
        elif args.command == "table1":
            rows = run_table1(cfg, args.out, jobs=args.jobs)
            failed = [r["label"] for r in rows if r["status"] != "ok"]
            if failed:
                print(f"table1: columns failed: {', '.join(failed)}", file=sys.stderr)
                return EXIT_SOLVER
        elif args.command == "figures":
            run_figures(cfg, args.out)
        elif args.command == "sweep":
            key, values = _parse_vary(args.vary)
            try:
                with_overrides(cfg, **{key: values[0]})
            except TypeError as exc:
                raise ConfigError(f"unknown sweep key {key!r}") from exc
            run_sweep(cfg, key, values, args.out, jobs=args.jobs)
        elif args.command == "convergence":
            levels = [int(tok) for tok in args.levels.split(",") if tok.strip()]
            payload = run_convergence(cfg, levels, args.out)
            if payload["det_decaying"]:
                print("convergence: observation Gram determinants decay toward zero",
                      file=sys.stderr)
                return EXIT_DIAGNOSTIC
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularModelError, OracleConvergenceError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
