#!/usr/bin/env python3
"""Added-mass tensor tables for the reference shapes (ellipse family, sphere,
two ellipsoids, starfish), checked against analytic or printed values."""

import argparse

from bodywave.harness import SHAPES, RunConfig, format_table, run_addedmass_table, write_json_report


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shape", choices=SHAPES, default="all")
    ap.add_argument("--resolution", type=int, default=512)
    ap.add_argument("--out", default=None, help="write the JSON report here")
    args = ap.parse_args()

    cfg = RunConfig(mode="addedmass_table", shape=args.shape, resolution=args.resolution)
    report = run_addedmass_table(cfg)
    print(format_table(report["rows"]))
    print(f"all reference checks pass: {report['all_ok']}")
    if args.out:
        write_json_report(args.out, report)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
