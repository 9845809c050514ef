"""Command-line interface.

Subcommands::

    srmot constants                 print resolved atomic data
    srmot steady                    steady state at the configured point
    srmot evolve                    time evolution (full + hybrid)
    srmot balance                   s56 / delta56 balance sweep
    srmot map                       (delta34, B') fluorescence map
    srmot potential                 trap potentials and depths
    srmot calibrate                 fluorescence -> atom-number calibration

Common flags: ``--config <path>`` (JSON scenario file), ``--out <path>``,
``--format csv|json``, ``--model full|hybrid|both``,
``--green-config grp|gmot``, ``--jobs <n>``.

Exit codes: 0 clean, 2 partial (some sweep points failed, recorded in
the table metadata), 1 fatal.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .config import ConfigError, load_config
from .sweeps import (Calibration, CalibrationError, calibrate,
                     run_balance_sweep, run_fluorescence_map,
                     run_potential_report, run_steady, run_time_evolution)
from .tables import ResultTable

TWO_PI = 2.0 * math.pi


def _add_common(parser: argparse.ArgumentParser, model: bool = True) -> None:
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="scenario config file (JSON); defaults apply when omitted")
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="output file; stdout when omitted")
    parser.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default from config)")
    parser.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="worker processes for grid sweeps")
    if model:
        parser.add_argument("--model", choices=("full", "hybrid", "both"),
                            default="both", help="which model(s) to evaluate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srmot",
        description="Two-color strontium MOT simulation: steady states, "
                    "balance curves, time evolution, fluorescence maps.")
    parser.add_argument("--version", action="version", version=f"srmot {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print resolved atomic data")
    p.add_argument("--config", metavar="PATH", default=None)
    p.add_argument("--out", metavar="PATH", default=None)

    _add_common(sub.add_parser("steady", help="steady state at the configured point"))
    _add_common(sub.add_parser("evolve", help="time evolution"))
    _add_common(sub.add_parser("balance", help="balance sweep over s56 or delta56"))

    p = sub.add_parser("map", help="fluorescence map over (delta34, B')")
    _add_common(p, model=False)
    p.add_argument("--green-config", choices=("grp", "gmot"), default=None,
                   help="green beam layout (overrides config)")

    _add_common(sub.add_parser("potential", help="trap potentials and depths"),
                model=False)

    p = sub.add_parser("calibrate", help="fluorescence -> atom number calibration")
    p.add_argument("--atoms", type=float, required=True,
                   help="independently measured atom number")
    p.add_argument("--excited-fraction", type=float, required=True,
                   help="modelled excited-state fraction")
    p.add_argument("--linewidth-hz", type=float, required=True,
                   help="transition linewidth, ordinary Hz")
    p.add_argument("--counts-per-s", type=float, required=True,
                   help="measured fluorescence count rate")
    p.add_argument("--color", choices=("blue", "green"), default="blue")
    p.add_argument("--out", metavar="PATH", default=None)
    return parser


def _emit_table(table: ResultTable, out, fmt: str) -> None:
    data = table.to_csv() if fmt == "csv" else table.to_json()
    if out is None:
        sys.stdout.write(data.decode())
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def _exit_code(*tables: ResultTable) -> int:
    return 2 if any(t.cell_errors for t in tables) else 0


def _cmd_constants(args) -> int:
    config = load_config(args.config)
    c = config.constants
    doc = {
        "rates_hz": {name: getattr(c, name) / TWO_PI for name in
                     ("gamma_12", "gamma_34", "gamma_56", "gamma_36",
                      "gamma_15", "gamma_23", "gamma_25", "gamma_45")},
        "wavelengths_m": {name: getattr(c, name) for name in
                          ("lambda_12", "lambda_34", "lambda_56", "lambda_15")},
        "cascade_hz": ({k: v / TWO_PI for k, v in c.cascade.items()}
                       if c.cascade else None),
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "constants":
            return _cmd_constants(args)

        if args.command == "calibrate":
            alpha = calibrate(args.atoms, args.excited_fraction,
                              TWO_PI * args.linewidth_hz, args.counts_per_s)
            kwargs = {"alpha_blue": alpha if args.color == "blue" else 1.0,
                      "alpha_green": alpha if args.color == "green" else 1.0}
            Calibration(**kwargs)  # range check
            doc = {"color": args.color, "alpha_counts_per_photon": alpha}
            text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
            if args.out is None:
                sys.stdout.write(text)
            else:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            return 0

        config = load_config(args.config)
        fmt = args.format or config.resolved["output"]["format"]

        if args.command == "steady":
            table = run_steady(config, model=args.model)
            _emit_table(table, args.out, fmt)
            return _exit_code(table)
        if args.command == "evolve":
            table = run_time_evolution(config, model=args.model)
            _emit_table(table, args.out, fmt)
            return _exit_code(table)
        if args.command == "balance":
            table = run_balance_sweep(config, model=args.model)
            _emit_table(table, args.out, fmt)
            return _exit_code(table)
        if args.command == "map":
            table = run_fluorescence_map(config, jobs=args.jobs,
                                         green_config=args.green_config)
            _emit_table(table, args.out, fmt)
            return _exit_code(table)
        if args.command == "potential":
            tables = run_potential_report(config)
            if args.out is None:
                for table in tables.values():
                    _emit_table(table, None, fmt)
            else:
                base, dot, ext = args.out.rpartition(".")
                if not dot:
                    base, ext = args.out, fmt
                tables["profile"].write(f"{base}.{ext}", fmt)
                tables["depth"].write(f"{base}_depth.{ext}", fmt)
            return _exit_code(*tables.values())
        raise AssertionError(f"unhandled command {args.command!r}")
    except (ConfigError, CalibrationError) as exc:
        print(f"srmot: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # fatal runner errors
        print(f"srmot: fatal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
