"""Command-line interface.

Subcommands
-----------
``run --config <file> --out <dir>``
    Simulate a configured experiment, then write ``series.csv``,
    ``report.json``, and ``coeffs.csv`` (the weights of the largest family
    member evaluated) into the output directory.
``coeffs --n <int> [--gaussian] [--out <dir>]``
    Print inequality coefficients (exact rationals for n <= 30, decimals
    always); optionally write ``coeffs.csv``.
``analyze --series <file> [--extrapolate-to <n>] --out <dir>``
    Run detection (and, when requested, zero-fill extrapolation) on an
    ingested series file and write ``series.csv`` + ``report.json``.
``presets --list``
    List the pinned experiment presets with their default parameters.

Exit codes: 0 = completed, no violation; 1 = completed, violation detected;
2 = input or schema error; 3 = runtime/simulation error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from .bounds import gaussian_sn_coefficients, sn_coefficients, sn_exact_fractions, truncation_plan
from .config import ConfigError, ExperimentConfig, build_experiment, load_config
from .detection import DetectionReport, ExtrapolationReport, detect, extrapolate
from .evolve import RecurrenceSeries, evolve, recurrence_exact, recurrence_sampled
from .presets import preset_defaults, preset_description, preset_names
from .reporting import (
    SeriesFormatError,
    fmt,
    read_series,
    report_to_dict,
    write_coeffs_csv,
    write_report_json,
    write_series_csv,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_RUNTIME = 3


def _simulate(config: ExperimentConfig) -> RecurrenceSeries:
    exp = build_experiment(config)
    states = evolve(exp.rho0, exp.spec, exp.channels, config.n_cycles)
    series = recurrence_exact(exp.rho0, states)
    if config.shots > 0:
        series = recurrence_sampled(series, config.shots, config.seed)
    return series


def _prefix(series: RecurrenceSeries, cutoff: int) -> RecurrenceSeries:
    cutoff = max(1, min(cutoff, len(series) - 1))
    return RecurrenceSeries(series.values[: cutoff + 1].copy(),
                            series.sigmas[: cutoff + 1].copy(), shots=series.shots)


def _analysis(
    series: RecurrenceSeries, config: ExperimentConfig
) -> tuple[DetectionReport, Optional[ExtrapolationReport]]:
    b = config.bounds
    report = detect(series, b.sn_max, include_optimized=b.optimized)
    extrap = None
    if b.truncation_xi is not None or b.truncation_epsilon is not None:
        plan = truncation_plan(b.sn_max, xi=b.truncation_xi,
                               epsilon=b.truncation_epsilon)
        extrap = extrapolate(_prefix(series, plan.cutoff), b.sn_max)
    elif b.sn_max > len(series) - 1:
        extrap = extrapolate(series, b.sn_max)
    return report, extrap


def _has_violation(report: DetectionReport,
                   extrap: Optional[ExtrapolationReport]) -> bool:
    if report.first_violation_n is not None:
        return True
    return extrap is not None and extrap.first_violation_n is not None


def _cmd_run(args) -> int:
    config = load_config(args.config)
    try:
        series = _simulate(config)
        report, extrap = _analysis(series, config)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error: simulation failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    os.makedirs(args.out, exist_ok=True)
    meta = {
        "experiment": config.experiment or "custom",
        "n_cycles": config.n_cycles,
        "shots": config.shots,
        "seed": config.seed,
    }
    top = min(config.bounds.sn_max, max(2, len(series) - 1))
    write_series_csv(os.path.join(args.out, "series.csv"), series)
    write_coeffs_csv(os.path.join(args.out, "coeffs.csv"), sn_coefficients(top))
    payload = report_to_dict(report, extrap, meta)
    write_report_json(os.path.join(args.out, "report.json"), payload)
    return EXIT_VIOLATION if _has_violation(report, extrap) else EXIT_OK


def _cmd_coeffs(args) -> int:
    if args.n < 2:
        print("error: --n must be >= 2", file=sys.stderr)
        return EXIT_INPUT
    if args.gaussian:
        coeffs = gaussian_sn_coefficients(args.n)
    else:
        coeffs = sn_coefficients(args.n)
        if args.n <= 30:
            print(", ".join(str(f) for f in sn_exact_fractions(args.n)))
    print(", ".join(fmt(w) for w in coeffs.w))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_coeffs_csv(os.path.join(args.out, "coeffs.csv"), coeffs)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    ingested = read_series(args.series)
    series = ingested.series
    n_top = max(2, len(series) - 1)
    try:
        report = detect(series, n_top)
        extrap = None
        if args.extrapolate_to is not None:
            if args.extrapolate_to < len(series) - 1:
                print("error: --extrapolate-to must reach the measured cutoff",
                      file=sys.stderr)
                return EXIT_INPUT
            extrap = extrapolate(series, args.extrapolate_to)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error: analysis failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    os.makedirs(args.out, exist_ok=True)
    write_series_csv(os.path.join(args.out, "series.csv"), series)
    payload = report_to_dict(report, extrap, {"source": ingested.source})
    write_report_json(os.path.join(args.out, "report.json"), payload)
    return EXIT_VIOLATION if _has_violation(report, extrap) else EXIT_OK


def _cmd_presets(args) -> int:
    for name in preset_names():
        defaults = preset_defaults(name)
        tail = ""
        if defaults:
            tail = " [" + ", ".join(f"{k}={v}" for k, v in defaults.items()) + "]"
        print(f"{name:14s} {preset_description(name)}{tail}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclebounds",
        description="Periodicity-inequality simulator and analyzer for cyclically driven qubit registers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a configured experiment")
    p_run.add_argument("--config", required=True, help="JSON config file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_coeffs = sub.add_parser("coeffs", help="print inequality coefficients")
    p_coeffs.add_argument("--n", type=int, required=True, help="family member index")
    p_coeffs.add_argument("--gaussian", action="store_true",
                          help="asymptotic Gaussian weights instead of exact")
    p_coeffs.add_argument("--out", help="also write coeffs.csv here")
    p_coeffs.set_defaults(func=_cmd_coeffs)

    p_an = sub.add_parser("analyze", help="run detection on a measured series")
    p_an.add_argument("--series", required=True, help="CSV (k,R[,sigma][,shots]) or JSON series")
    p_an.add_argument("--extrapolate-to", type=int, default=None,
                      help="zero-fill extrapolation horizon")
    p_an.add_argument("--out", required=True, help="output directory")
    p_an.set_defaults(func=_cmd_analyze)

    p_list = sub.add_parser("presets", help="list pinned experiment presets")
    p_list.add_argument("--list", action="store_true", help="list presets (default)")
    p_list.set_defaults(func=_cmd_presets)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SeriesFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
