"""Command-line interface.

Verbs:

* ``zoo``         - dump the built-in model zoo, one JSON object per line.
* ``analyze``     - project one configuration and print its breakdown JSON.
* ``calibrate``   - build a cost-model JSON file from a profile CSV.
* ``estimate-tp`` - tensor-parallel degree estimate for a parameter count.
* ``sweep``       - run a grid sweep and write result/plot-data CSV files.
* ``evolve``      - analyze one configuration across several
  compute-vs-bandwidth evolution factors.

Commands are non-interactive and deterministic; stdout carries only the
declared payload, diagnostics go to stderr. Exit codes: 0 success, 1 usage
error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, analytic, sweep as sweep_mod
from .config import ConfigError, MODEL_ZOO, ZOO_ORDER, load_config
from .costmodel import CostModel, ProfileError, parse_profile
from .projector import combined_breakdown
from .reference import REFERENCE_HARDWARE, reference_cost_model

USAGE_ERROR = 1
DATA_ERROR = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="commscale",
                     description="Compute vs. communication projection for "
                                 "distributed Transformer training.")
    parser.add_argument("--version", action="version", version=f"commscale {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    sub.add_parser("zoo", help="print the model zoo as JSON lines")

    def add_pricing(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--cost-model", metavar="FILE",
                           help="calibrated cost-model JSON file")
        group.add_argument("--roofline", action="store_true",
                           help="price with the ideal roofline model")
        group.add_argument("--reference", action="store_true",
                           help="price with the bundled reference cost model")

    p_analyze = sub.add_parser("analyze", help="project one configuration")
    p_analyze.add_argument("config", help="configuration JSON file")
    add_pricing(p_analyze)
    p_analyze.add_argument("--flop-vs-bw", type=float, default=1.0,
                           help="compute-vs-bandwidth evolution factor (>= 1)")
    p_analyze.add_argument("--dp-slowdown", type=float, default=1.0,
                           help="extra multiplier on DP all-reduce time (>= 1)")

    p_cal = sub.add_parser("calibrate", help="build a cost model from a profile CSV")
    p_cal.add_argument("profile", help="profile CSV file")
    p_cal.add_argument("--config", help="configuration JSON file supplying the "
                                        "hardware section (defaults otherwise)")
    p_cal.add_argument("-o", "--out", required=True, help="output cost-model JSON path")

    p_tp = sub.add_parser("estimate-tp", help="estimate the required TP degree")
    p_tp.add_argument("--params", type=float, required=True,
                      help="model parameter count")
    p_tp.add_argument("--mem-scale", type=float, default=1.0,
                      help="per-device memory capacity scaling since the anchor")
    p_tp.add_argument("--base-params", type=float, default=analytic.MEGATRON_BERT_PARAMS)
    p_tp.add_argument("--base-tp", type=int, default=analytic.MEGATRON_BERT_TP)
    p_tp.add_argument("--round", dest="rounding", choices=("ceil", "next_pow2"),
                      default="ceil")

    p_sweep = sub.add_parser("sweep", help="evaluate a configuration grid")
    src = p_sweep.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", metavar="FILE", help="sweep spec JSON file")
    src.add_argument("--table3-defaults", action="store_true",
                     help="use the default design-space grid")
    add_pricing(p_sweep)
    p_sweep.add_argument("--figure", choices=sweep_mod.FIGURES, default="none",
                         help="also emit plot data reshaped for this figure")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--out", help="result table path (stdout when omitted)")
    p_sweep.add_argument("--plot-out", help="plot-data path (default: OUT with "
                                            "a .plot.csv suffix)")

    p_evolve = sub.add_parser("evolve",
                              help="analyze one configuration across evolution factors")
    p_evolve.add_argument("config", help="configuration JSON file")
    add_pricing(p_evolve)
    p_evolve.add_argument("--flop-vs-bw", default="1,2,4",
                          help="comma-separated evolution factors (default 1,2,4)")
    p_evolve.add_argument("--dp-slowdown", type=float, default=1.0)
    return parser


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _pricing(args, hardware) -> CostModel:
    if args.cost_model:
        return CostModel.from_json(_read_text(args.cost_model))
    if args.reference:
        return reference_cost_model()
    if args.roofline:
        return CostModel.roofline(hardware)
    raise _UsageError("a pricing source is required: --cost-model FILE, "
                      "--roofline, or --reference")


def _cmd_zoo(args) -> int:
    for name in ZOO_ORDER:
        print(json.dumps(MODEL_ZOO[name].to_dict()))
    return 0


def _cmd_analyze(args) -> int:
    model, parallelism, hardware = load_config(_read_text(args.config))
    costs = _pricing(args, hardware)
    breakdown = combined_breakdown(model, parallelism, costs,
                                   flop_vs_bw=args.flop_vs_bw,
                                   dp_slowdown=args.dp_slowdown)
    ratios = analytic.edge_slack(model, parallelism)
    payload = breakdown.to_dict()
    payload["edge_ratio"] = ratios.edge_ratio
    payload["slack_ratio"] = ratios.slack_ratio
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_calibrate(args) -> int:
    records = parse_profile(_read_text(args.profile))
    hardware = REFERENCE_HARDWARE
    if args.config:
        _, _, hardware = load_config(_read_text(args.config))
    model = CostModel.calibrate(records, hardware)
    Path(args.out).write_text(model.to_json())
    print(json.dumps(model.baseline_counts(), sort_keys=True))
    return 0


def _cmd_estimate_tp(args) -> int:
    for label, value in (("--params", args.params), ("--mem-scale", args.mem_scale),
                         ("--base-params", args.base_params), ("--base-tp", args.base_tp)):
        if not value > 0:
            raise _UsageError(f"{label} must be positive (got {value})")
    raw = analytic.estimate_tp_raw(args.params, args.mem_scale,
                                   args.base_params, args.base_tp)
    rounded = analytic.estimate_tp(args.params, args.mem_scale,
                                   args.base_params, args.base_tp, args.rounding)
    print(json.dumps({"raw": raw, "tp": rounded, "rounding": args.rounding}))
    return 0


def _cmd_sweep(args) -> int:
    if args.figure == "fig7":
        table = sweep_mod.trend_table(analytic.trend_series())
        plot = sweep_mod.emit_report(table, figure="fig7")
        if args.out:
            Path(args.out).write_text(plot)
        else:
            sys.stdout.write(plot)
        return 0

    spec = (sweep_mod.SweepSpec.from_json(_read_text(args.spec))
            if args.spec else sweep_mod.SweepSpec())
    grid = sweep_mod.build_grid(spec)
    if not grid:
        print("warning: grid is empty after filtering", file=sys.stderr)
        return 0
    costs = _pricing(args, spec.hardware or REFERENCE_HARDWARE)
    table = sweep_mod.run_sweep(grid, costs)
    report = sweep_mod.emit_report(table, fmt=args.format)
    if args.out:
        Path(args.out).write_text(report)
    else:
        sys.stdout.write(report)
    if args.figure != "none":
        plot = sweep_mod.emit_report(table, figure=args.figure)
        plot_path = args.plot_out or (f"{args.out}.plot.csv" if args.out else None)
        if plot_path:
            Path(plot_path).write_text(plot)
        else:
            sys.stdout.write(plot)
    return 0


def _cmd_evolve(args) -> int:
    try:
        factors = [float(part) for part in str(args.flop_vs_bw).split(",") if part]
    except ValueError as exc:
        raise _UsageError(f"bad --flop-vs-bw list: {exc}") from exc
    if not factors:
        raise _UsageError("--flop-vs-bw needs at least one factor")
    model, parallelism, hardware = load_config(_read_text(args.config))
    costs = _pricing(args, hardware)
    payload = []
    for factor in factors:
        breakdown = combined_breakdown(model, parallelism, costs,
                                       flop_vs_bw=factor,
                                       dp_slowdown=args.dp_slowdown)
        entry = breakdown.to_dict()
        entry["flop_vs_bw"] = factor
        payload.append(entry)
    print(json.dumps(payload, indent=2))
    return 0


_COMMANDS = {
    "zoo": _cmd_zoo,
    "analyze": _cmd_analyze,
    "calibrate": _cmd_calibrate,
    "estimate-tp": _cmd_estimate_tp,
    "sweep": _cmd_sweep,
    "evolve": _cmd_evolve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.verb](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ConfigError, ProfileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
