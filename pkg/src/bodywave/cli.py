"""Command-line front end.

Subcommands: simulate, converge, stability, addedmass, rb3d.  Options come
from an optional JSON config file with individual flags overriding keys.
Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .addedmass import DegenerateGeometry, UnsupportedShape
from .coupling import SingularBodyUpdate
from .exact import DomainError
from .harness import (
    RunConfig,
    format_table,
    run_mode,
    write_csv_table,
    write_json_report,
)
from .rigidbody3d import NewtonDivergence, NonphysicalPressure, SingularStage
from .schemes import CflViolation
from .stability import DegenerateQuadratic

SUBCOMMAND_MODES = {
    "simulate": "simulate1d",
    "converge": "converge1d",
    "stability": "stability_sweep",
    "addedmass": "addedmass_table",
    "rb3d": "rigidbody3d_demo",
}

NUMERICAL_ERRORS = (
    CflViolation,
    SingularBodyUpdate,
    SingularStage,
    NewtonDivergence,
    NonphysicalPressure,
    DomainError,
    DegenerateGeometry,
    DegenerateQuadratic,
    UnsupportedShape,
    FloatingPointError,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bodywave",
        description="Partitioned fluid/rigid-body model problems: runs, sweeps, tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, mode in SUBCOMMAND_MODES.items():
        p = sub.add_parser(name, help=f"run mode {mode}")
        p.add_argument("--config", help="JSON config file; flags override its keys")
        p.add_argument("--out", help="output path (.json report or .csv table)")
        p.add_argument("--scheme", choices=("first", "second"))
        p.add_argument("--coupling", choices=("traditional", "projection", "custom"))
        p.add_argument("--alpha-left", type=float, dest="alpha_left")
        p.add_argument("--alpha-right", type=float, dest="alpha_right")
        p.add_argument("--mass", type=float)
        p.add_argument("--cfl", type=float)
        p.add_argument("--cells", type=int, dest="n_cells")
        p.add_argument("--levels", type=int)
        p.add_argument("--tfinal", type=float, dest="t_final")
        p.add_argument("--seed", type=int)
        if name == "addedmass":
            p.add_argument("--shape", choices=("ellipse", "sphere", "ellipsoid", "starfish", "all"))
            p.add_argument("--resolution", type=int)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            file_data = json.load(fh)
        if not isinstance(file_data, dict):
            raise ValueError("config file must hold a JSON object")
        data.update(file_data)
    data["mode"] = SUBCOMMAND_MODES[args.command]
    for key in (
        "out", "scheme", "coupling", "alpha_left", "alpha_right", "mass", "cfl",
        "n_cells", "levels", "t_final", "seed", "shape", "resolution",
    ):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return RunConfig.from_dict(data)


def _emit(report: dict, cfg: RunConfig) -> None:
    if "rows" in report:
        print(format_table(report["rows"]))
        if cfg.out:
            write_csv_table(cfg.out, report["rows"], report["config"])
            print(f"wrote {cfg.out}")
    else:
        if cfg.out:
            write_json_report(cfg.out, report)
            print(f"wrote {cfg.out}")
        else:
            write_json_report("/dev/stdout", report)


def _summarize(report: dict) -> None:
    if "rates" in report:
        rates = ", ".join(f"{k}={v:.3f}" for k, v in report["rates"].items())
        print(f"fitted rates: {rates}")
    if "all_agree" in report:
        print(f"prediction/measurement agreement: {report['all_agree']}")
    if "all_ok" in report:
        print(f"all reference checks passed: {report['all_ok']}")
    if "errors" in report:
        errs = ", ".join(f"{k}={v:.3e}" for k, v in report["errors"].items())
        print(f"errors vs exact solution: {errs}")
    if "max_e_drift" in report:
        print(f"max axes orthogonality drift: {report['max_e_drift']:.3e}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run_mode(cfg)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    try:
        _emit(report, cfg)
        _summarize(report)
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `bodywave ... | head`); point
        # stdout at devnull so the interpreter's exit flush stays quiet
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return 0


if __name__ == "__main__":
    sys.exit(main())
