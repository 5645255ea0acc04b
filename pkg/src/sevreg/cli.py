"""Command-line surface: ``sevreg fit | simulate | diagnose``.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 the fit did
not converge (the report is still written, flagged ``converged: false``).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import estimation
from .diagnostics import (
    CoefficientTest,
    coefficient_tests,
    quantile_residuals,
    selection_report,
    t_sf,
)
from .exceptions import DataError, NumericError, StdErrorsUnavailable
from .io import (
    ConfigError,
    fit_report,
    load_json,
    parse_fit_report,
    parse_model_config,
    parse_simulation_config,
    read_csv,
    write_dataset_csv,
    write_json,
    write_qq_csv,
    write_residuals_csv,
)
from .regression import encode
from .simulation import sample

USAGE_ERROR = 1
DATA_ERROR = 2
NOT_CONVERGED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sevreg",
        description="Fit, simulate and diagnose composite lognormal severity regressions.",
        epilog="SEVERITY_THREADS caps the number of worker threads used for multi-start fits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a model to CSV data")
    p_fit.add_argument("--data", required=True, help="CSV file with header row")
    p_fit.add_argument("--config", required=True, help="JSON model config")
    p_fit.add_argument("--out", required=True, help="output directory")
    p_fit.add_argument("--standardize", action="store_true",
                       help="z-score numeric covariates during optimization "
                            "(coefficients are reported on the original scale)")

    p_sim = sub.add_parser("simulate", help="draw a synthetic dataset")
    p_sim.add_argument("--config", required=True, help="JSON simulation config")
    p_sim.add_argument("--n", type=int, default=None, help="rows to draw (overrides config)")
    p_sim.add_argument("--seed", type=int, default=None, help="generator seed (overrides config)")
    p_sim.add_argument("--out", required=True, help="output CSV path")

    p_diag = sub.add_parser("diagnose", help="recompute diagnostics from a saved fit")
    p_diag.add_argument("--data", required=True, help="CSV file the model was fitted to")
    p_diag.add_argument("--fit", required=True, help="fit.json produced by the fit command")
    p_diag.add_argument("--out", required=True, help="output directory")
    return parser


def _cmd_fit(args) -> int:
    config = parse_model_config(load_json(args.config))
    if args.standardize and not config.standardize:
        config = replace(config, standardize=True)
    dataset, report = read_csv(args.data, config)
    design = encode(dataset, [c.name for c in config.covariates])
    result = estimation.fit(dataset, design, config.family,
                            controls=config.controls, standardize=config.standardize)
    selection = selection_report(result.nll, result.df, result.n)
    try:
        tests = coefficient_tests(result, design)
    except StdErrorsUnavailable:
        tests = None
    residuals = quantile_residuals(result, dataset, design)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "fit.json", fit_report(result, config, selection, tests))
    write_residuals_csv(out / "residuals.csv", dataset, residuals)
    write_qq_csv(out / "qq.csv", residuals)

    print(f"read {report.n_rows} rows ({report.n_rejected} rejected)")
    print(f"nll {result.nll:.6f}  aic {selection.aic:.6f}  bic {selection.bic:.6f}")
    print(f"converged: {result.converged}  iterations: {result.iterations}")
    print(f"wrote {out / 'fit.json'}, {out / 'residuals.csv'}, {out / 'qq.csv'}")
    return 0 if result.converged else NOT_CONVERGED


def _cmd_simulate(args) -> int:
    plan, response = parse_simulation_config(load_json(args.config), args.n, args.seed)
    dataset = sample(plan)
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    write_dataset_csv(out, dataset, response=response)
    print(f"wrote {dataset.n} rows to {out}")
    return 0


def _cmd_diagnose(args) -> int:
    params, config, doc = parse_fit_report(load_json(args.fit))
    dataset, _ = read_csv(args.data, config)
    design = encode(dataset, [c.name for c in config.covariates])
    if design.p != params.gamma.size:
        raise ConfigError("fit report coefficients do not match the encoded design")
    selection = selection_report(float(doc["nll"]), int(doc["df"]), doc["n"])
    dof = doc["n"] - design.p
    tests = []
    for entry in doc["coefficients"]:
        se = entry.get("std_error")
        if se is None:
            tests = None
            break
        t = float(entry["estimate"]) / float(se)
        p = 2.0 * t_sf(abs(t), dof)
        tests.append(CoefficientTest(
            name=str(entry["name"]), estimate=float(entry["estimate"]), std_error=float(se),
            t_ratio=t, p_value=float(p), significant=bool(p < 0.05),
        ))
    residuals = quantile_residuals(params, dataset, design)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    diag_doc = {
        "family": params.family,
        "nll": float(doc["nll"]),
        "aic": selection.aic,
        "bic": selection.bic,
        "df": int(doc["df"]),
        "n": doc["n"],
        "coefficients": [
            {"name": t.name, "estimate": t.estimate, "std_error": t.std_error,
             "t_ratio": t.t_ratio, "p_value": t.p_value}
            for t in tests
        ] if tests is not None else None,
        "n_saturated_residuals": residuals.n_saturated,
    }
    write_json(out / "diagnostics.json", diag_doc)
    write_residuals_csv(out / "residuals.csv", dataset, residuals)
    write_qq_csv(out / "qq.csv", residuals)
    print(f"wrote {out / 'diagnostics.json'}, {out / 'residuals.csv'}, {out / 'qq.csv'}")
    return 0


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else USAGE_ERROR
    try:
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_diagnose(args)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (DataError, NumericError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DATA_ERROR


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
