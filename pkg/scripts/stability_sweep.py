#!/usr/bin/env python3
"""Predicted vs measured per-step growth for the partitioned couplings over
a grid of time steps (multiples of the traditional first-order bound
dt* = m (4 - lambda) / (z lambda))."""

import argparse

from bodywave.harness import RunConfig, format_table, run_stability_sweep, write_json_report


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mass", type=float, default=1e-3)
    ap.add_argument("--cfl", type=float, default=0.8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="write the JSON report here")
    args = ap.parse_args()

    cfg = RunConfig(mode="stability_sweep", mass=args.mass, cfl=args.cfl, seed=args.seed)
    report = run_stability_sweep(cfg)
    print(format_table(report["rows"]))
    print(f"all rows agree: {report['all_agree']}")
    if args.out:
        write_json_report(args.out, report)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
