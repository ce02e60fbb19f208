"""Command-line entry point.

Subcommands: ``simulate``, ``sweep``, ``dissipation-time``, ``fit``,
``ks``, ``oracle-check``, ``validate``. All but ``fit`` take a TOML
configuration file; ``fit`` consumes a trajectory CSV and prints a JSON
fit summary. Scenario runs exit 0 on pass, 1 on fail, 2 on invalid
configuration.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys

from .diagnostics import fit_exponential, fit_power_law
from .experiments import (
    ConfigError,
    load_config,
    run_dissipation_time,
    run_scenario,
    run_simulate,
    validate_config,
)


def _add_config_command(sub, name: str, help_text: str):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("config", help="TOML configuration file")
    p.add_argument("--out", default=None, help="output directory override")
    return p


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixlab",
        description="Mixing and enhanced dissipation experiments on the 2D torus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_config_command(sub, "simulate", "run a single trajectory")
    _add_config_command(sub, "sweep", "run the configured scenario and its sweep")
    _add_config_command(sub, "dissipation-time", "measure dissipation times")
    _add_config_command(sub, "ks", "run the Keller-Segel suppression scenario")
    _add_config_command(sub, "oracle-check", "cross-check solver against Monte Carlo")

    fitp = sub.add_parser("fit", help="fit a decay law to a trajectory CSV column")
    fitp.add_argument("csv", help="trajectory CSV file")
    fitp.add_argument(
        "--kind",
        choices=("power", "exponential"),
        default="power",
        help="fit model (default: power)",
    )
    fitp.add_argument(
        "--column", default="h_minus_1", help="CSV column to fit (default: h_minus_1)"
    )
    fitp.add_argument("--t-min", type=float, default=None, help="window lower edge")
    fitp.add_argument("--t-max", type=float, default=None, help="window upper edge")
    fitp.add_argument(
        "--floor",
        type=float,
        default=None,
        help="truncate an exponential fit at this value",
    )

    valp = sub.add_parser("validate", help="list configuration violations")
    valp.add_argument("config", help="TOML configuration file")
    return parser


def _scenario_override(config, scenario: str):
    if config.scenario is None:
        return dataclasses.replace(config, scenario=scenario)
    if config.scenario != scenario:
        raise ConfigError(
            f"this subcommand runs scenario {scenario!r}, "
            f"but the config sets {config.scenario!r}"
        )
    return config


def _print_report(report) -> int:
    print(f"scenario: {report.scenario}")
    for key, value in sorted(report.results.items()):
        if isinstance(value, (int, float, str, bool)) or value is None:
            print(f"  {key}: {value}")
    print("PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


def _cmd_fit(args) -> int:
    with open(args.csv, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or args.column not in reader.fieldnames:
            have = ", ".join(reader.fieldnames or ())
            print(
                f"error: column {args.column!r} not in CSV (have: {have})",
                file=sys.stderr,
            )
            return 2
        rows = [(float(r["t"]), float(r[args.column])) for r in reader]
    times = [t for t, _ in rows]
    values = [v for _, v in rows]
    window = None
    if args.t_min is not None or args.t_max is not None:
        window = (
            args.t_min if args.t_min is not None else 0.0,
            args.t_max if args.t_max is not None else float("inf"),
        )
    try:
        if args.kind == "power":
            fit = fit_power_law(times, values, window=window)
        else:
            fit = fit_exponential(times, values, window=window, floor=args.floor)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = {
        "kind": fit.kind,
        "exponent_or_rate": fit.exponent if fit.kind == "power" else fit.rate,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "t_min": fit.t_min,
        "t_max": fit.t_max,
    }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    violations = validate_config(config)
    if violations:
        for v in violations:
            print(v)
        return 1
    print("ok")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "validate":
            return _cmd_validate(args)
        config = load_config(args.config)
        if args.command == "simulate":
            report = run_simulate(config, output_dir=args.out)
        elif args.command == "dissipation-time":
            report = run_dissipation_time(config, output_dir=args.out)
        elif args.command == "ks":
            report = run_scenario(
                _scenario_override(config, "keller_segel_suppression"),
                output_dir=args.out,
            )
        elif args.command == "oracle-check":
            report = run_scenario(
                _scenario_override(config, "oracle_check"), output_dir=args.out
            )
        else:  # sweep
            report = run_scenario(config, output_dir=args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _print_report(report)


if __name__ == "__main__":
    raise SystemExit(main())
