#!/usr/bin/env python3
"""Grid-refinement study of the coupled 1D schemes against the closed-form
solution: both schemes, body masses 1, 1e-6, and 0, errors and rates.

The coarsest grid has dx = 1/50 per side (n_cells = 100 on a length-2
domain) and each level halves dx.
"""

import argparse

from bodywave.harness import RunConfig, format_table, run_convergence_study, write_json_report

ERROR_KEYS = ("v_max", "sigma_max", "v_l1", "sigma_l1", "v_body_max")


def study_rows(report: dict) -> list[dict]:
    rows = []
    for lv in report["levels"]:
        row = {"n_cells": lv["n_cells"], "dx": lv["dx"]}
        row.update({k: lv["errors"][k] for k in ERROR_KEYS})
        rows.append(row)
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, default=5)
    ap.add_argument("--cells", type=int, default=100, help="coarsest per-side cell count")
    ap.add_argument("--cfl", type=float, default=0.8)
    ap.add_argument("--out-prefix", default=None, help="write one JSON report per study")
    args = ap.parse_args()

    for scheme in ("first", "second"):
        for mass in (1.0, 1e-6, 0.0):
            cfg = RunConfig(
                mode="converge1d", scheme=scheme, coupling="projection",
                mass=mass, cfl=args.cfl, n_cells=args.cells, levels=args.levels,
            )
            report = run_convergence_study(cfg)
            print(f"\n== scheme={scheme}  coupling=projection  mass={mass:g} ==")
            print(format_table(study_rows(report)))
            print("rates: " + "  ".join(
                f"{k}={report['rates'][k]:.3f}" for k in ERROR_KEYS))
            if args.out_prefix:
                path = f"{args.out_prefix}_{scheme}_m{mass:g}.json"
                write_json_report(path, report)
                print(f"wrote {path}")


if __name__ == "__main__":
    main()
