"""Experiment harness and CLI: configs, reports, tables, and exit codes."""

import json
from math import sqrt

import numpy as np
import pytest

from bodywave.cli import main
from bodywave.harness import (
    RunConfig,
    format_table,
    run_addedmass_table,
    run_convergence_study,
    run_rigidbody_demo,
    run_simulation,
    run_stability_sweep,
    write_csv_table,
    write_json_report,
)


# -- configuration -------------------------------------------------------------


def test_config_defaults_mirror_reference_setup():
    cfg = RunConfig()
    assert cfg.c_left == sqrt(2.0) and cfg.c_right == sqrt(3.0)
    assert cfg.beta == 10.0 and cfg.x0 == -0.5 and cfg.t_final == 0.75
    mat_l, mat_r = cfg.materials()
    assert mat_l.z == sqrt(2.0) and mat_r.z == sqrt(3.0)


@pytest.mark.parametrize(
    "overrides",
    [
        {"mode": "nope"},
        {"scheme": "third"},
        {"coupling": "magic"},
        {"coupling": "custom"},  # missing alpha_left/alpha_right
        {"mass": -1.0},
        {"cfl": 0.0},
        {"cfl": 1.5},
        {"levels": 0},
        {"t_final": 0.0},
        {"n_cells": 2},
        {"shape": "cube"},
        {"resolution": 4},
        {"domain_length": -2.0},
    ],
)
def test_config_validation_errors(overrides):
    with pytest.raises(ValueError):
        RunConfig(**overrides)


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown config keys"):
        RunConfig.from_dict({"mass": 1.0, "bogus": 3})


def test_config_json_round_trip(tmp_path):
    cfg = RunConfig(mode="converge1d", scheme="first", mass=1e-3, levels=3)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert RunConfig.from_json(str(path)) == cfg


def test_alphas_per_coupling():
    assert RunConfig(coupling="traditional").alphas() == (0.0, 0.0)
    assert RunConfig(coupling="projection").alphas() == (sqrt(2.0), sqrt(3.0))
    cfg = RunConfig(coupling="custom", alpha_left=0.3, alpha_right=0.7)
    assert cfg.alphas() == (0.3, 0.7)


# -- simulation and convergence -------------------------------------------------


def test_simulation_report_contents():
    cfg = RunConfig(scheme="first", n_cells=20, t_final=0.1)
    rep = run_simulation(cfg)
    assert rep["dt"] * rep["n_steps"] == pytest.approx(0.1, abs=1e-15)
    assert rep["courant_right"] <= cfg.cfl * (1.0 + 1e-12)
    assert rep["courant_left"] < rep["courant_right"]  # slower side
    assert not rep["diverged"]
    assert all(np.isfinite(v) for v in rep["errors"].values())
    assert rep["final"]["t"] == pytest.approx(0.1)


def test_simulation_error_shrinks_with_grid():
    coarse = run_simulation(RunConfig(scheme="second", n_cells=50, t_final=0.3))
    fine = run_simulation(RunConfig(scheme="second", n_cells=200, t_final=0.3))
    assert fine["errors"]["v_max"] < 0.4 * coarse["errors"]["v_max"]


def test_convergence_study_second_order_rates():
    cfg = RunConfig(mode="converge1d", scheme="second", mass=1.0, levels=3)
    rep = run_convergence_study(cfg)
    assert [lv["n_cells"] for lv in rep["levels"]] == [100, 200, 400]
    assert rep["diverged_levels"] == []
    for key in ("v_max", "sigma_max", "v_body_max"):
        assert len(rep["ratios"][key]) == 2
        assert 1.6 < rep["rates"][key] < 2.2, f"{key}: {rep['rates'][key]}"


def test_convergence_study_flags_divergence():
    # Traditional coupling far beyond its stability bound blows up and the
    # study must say so instead of reporting rates.
    cfg = RunConfig(
        mode="converge1d", scheme="first", coupling="traditional",
        mass=1e-6, levels=2, n_cells=50, t_final=2.0,
    )
    with np.errstate(over="ignore", invalid="ignore"):
        rep = run_convergence_study(cfg)
    assert rep["diverged_levels"] == [0, 1]
    assert all(not np.isfinite(rep["rates"][k]) for k in rep["rates"])


# -- stability sweep ------------------------------------------------------------


def test_stability_sweep_rows_and_agreement():
    rep = run_stability_sweep(RunConfig(mode="stability_sweep", mass=1e-3))
    assert rep["all_agree"]
    by_key = {
        (r["scheme"], r["coupling"], r["mass"], round(r["dt_over_bound"], 3)): r
        for r in rep["rows"]
    }
    grow = by_key[("first", "traditional", 1e-3, 1.1)]
    assert not grow["predicted_stable"] and not grow["measured_stable"]
    assert grow["measured_rate"] == pytest.approx(1.527098, abs=1e-4)
    assert grow["predicted"] == pytest.approx(grow["measured_rate"], rel=1e-6)

    ok = by_key[("first", "projection", 1e-3, 2.0)]
    assert ok["predicted_stable"] and ok["measured_stable"]

    refused = by_key[("first", "traditional", 0.0, 2.0)]
    assert refused["measured_rate"] is None and refused["agree"]
    assert refused["predicted"] == "unbounded"

    second_bad = by_key[("second", "traditional", 1e-3, 0.5)]
    assert second_bad["predicted"] == "2 unstable modes"
    assert second_bad["measured_rate"] == pytest.approx(1.8257, abs=1e-3)

    second_ok = by_key[("second", "projection", 1e-3, 10.0)]
    assert second_ok["predicted_stable"] and second_ok["measured_stable"]


# -- added-mass table and demo ----------------------------------------------------


def test_addedmass_table_reference_checks():
    rep = run_addedmass_table(RunConfig(mode="addedmass_table", resolution=512))
    assert rep["all_ok"], [r for r in rep["rows"] if not r["ok"]]
    by_entry = {(r["shape"], r["params"], r["entry"]): r for r in rep["rows"]}
    ell = by_entry[("ellipse", "a=1 b=0.5", "avv_11")]
    assert ell["reference"] == 1.26 and ell["abs_diff"] < 5e-3
    sph = by_entry[("sphere", "a=1", "avv_11")]
    assert sph["rel_diff"] < 1e-12
    star = by_entry[("starfish", "arms=5", "symmetry_drift")]
    assert star["ok"]


def test_addedmass_table_single_shape():
    rep = run_addedmass_table(RunConfig(mode="addedmass_table", shape="sphere", resolution=64))
    assert {r["shape"] for r in rep["rows"]} == {"sphere"}
    assert rep["all_ok"]


def test_rigidbody_demo_history():
    rep = run_rigidbody_demo(RunConfig(mode="rigidbody3d_demo"))
    hist = rep["history"]
    assert len(hist["t"]) == rep["n_steps"] + 1
    assert rep["max_e_drift"] < 1e-10
    assert abs(hist["v"][-1][0]) > 1e-3  # the forcing actually moved the body
    assert hist["v"][0] == [0.0, 0.0, 0.0]


# -- report writers --------------------------------------------------------------


def test_write_csv_table_deterministic(tmp_path):
    rep = run_addedmass_table(RunConfig(mode="addedmass_table", shape="ellipse", resolution=64))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv_table(str(p1), rep["rows"], rep["config"])
    write_csv_table(str(p2), rep["rows"], rep["config"])
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    echo = [ln for ln in lines if ln.startswith("# ")]
    assert any(ln.startswith("# mode = ") for ln in echo)
    header = lines[len(echo)]
    assert header.split(",")[:3] == ["shape", "params", "entry"]


def test_write_csv_table_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        write_csv_table(str(tmp_path / "x.csv"), [], {})


def test_write_json_report_parses_back(tmp_path):
    rep = run_simulation(RunConfig(scheme="first", n_cells=16, t_final=0.05))
    path = tmp_path / "rep.json"
    write_json_report(str(path), rep)
    loaded = json.loads(path.read_text())
    assert loaded["config"]["n_cells"] == 16
    assert loaded["errors"]["v_max"] == pytest.approx(rep["errors"]["v_max"])


def test_format_table_rendering():
    assert format_table([]) == "(empty)"
    text = format_table([{"a": 1.5, "b": None}, {"a": 2.0, "b": "x"}])
    lines = text.splitlines()
    assert lines[0].split() == ["a", "b"]
    assert "-" in lines[1]


# -- CLI --------------------------------------------------------------------------


def test_cli_simulate_writes_json(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["simulate", "--cells", "16", "--tfinal", "0.05", "--out", str(out)])
    assert code == 0
    assert "errors vs exact solution" in capsys.readouterr().out
    assert json.loads(out.read_text())["config"]["n_cells"] == 16


def test_cli_flag_overrides_config_file(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"mass": 5.0, "n_cells": 16, "t_final": 0.05}))
    out = tmp_path / "rep.json"
    code = main(["simulate", "--config", str(cfg_path), "--mass", "2.0", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["config"]["mass"] == 2.0


def test_cli_validation_error_exits_2(capsys):
    assert main(["simulate", "--cfl", "1.5"]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_unknown_config_key_exits_2(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"bogus": 1}))
    assert main(["simulate", "--config", str(cfg_path)]) == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_cli_numerical_failure_exits_3(capsys):
    code = main([
        "simulate", "--coupling", "traditional", "--mass", "0",
        "--cells", "16", "--tfinal", "0.05",
    ])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_cli_addedmass_stdout_table(capsys):
    code = main(["addedmass", "--shape", "sphere", "--resolution", "64"])
    assert code == 0
    out = capsys.readouterr().out
    assert "avv_11" in out
    assert "all reference checks passed: True" in out


def test_cli_converge_reports_rates(capsys):
    code = main([
        "converge", "--cells", "16", "--levels", "2", "--tfinal", "0.05",
        "--scheme", "second",
    ])
    assert code == 0
    assert "fitted rates" in capsys.readouterr().out
