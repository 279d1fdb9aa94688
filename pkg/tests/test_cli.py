import csv
import json
import os

import pytest

from orlicz_lab import cli, config as cf, orlicz, space as sp, young
from orlicz_lab.errors import ConfigError


def write_doc(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def read_report(out_dir):
    with open(os.path.join(out_dir, "report.json")) as fh:
        return json.load(fh)


def atomic_doc(command, **over):
    doc = {"schema_version": "1", "command": command, "seed": 3,
           "young": {"phi": {"family": "power_scaled", "p": 2}},
           "space": {"builder": "atomic", "masses": [0.5, 0.25, 0.25]},
           "weight": {"values": [2.0, 1.0, 0.5]},
           "params": {}}
    doc.update(over)
    return doc


# -- fixtures ---------------------------------------------------------------


def test_emit_fixture_writes_parseable_configs(tmp_path):
    for name in cli.FIXTURES:
        path = cli.emit_fixture(name, str(tmp_path))
        assert os.path.basename(path) == f"{name}.json"
        cfg = cf.load_config(path)
        assert cfg.command in cf.COMMANDS
    with pytest.raises(ConfigError, match="unknown fixture"):
        cli.emit_fixture("example-9-99", str(tmp_path))


def test_lpq_fixtures_round_trip(tmp_path, capsys):
    div = cli.emit_fixture("lpq-divergent", str(tmp_path))
    bnd = cli.emit_fixture("lpq-bounded", str(tmp_path))
    out = str(tmp_path / "out")
    assert cli.main(["--config", div, "--output-dir", out]) == 0
    rep = read_report(out)
    assert rep["results"]["reports"][0]["criterion_id"] == "rem26"
    assert rep["results"]["reports"][0]["verdict"] == "diverges"
    assert cli.main(["--config", div, "--strict", "--output-dir", out]) == 2
    assert cli.main(["--config", bnd, "--strict", "--output-dir", out]) == 0
    rep = read_report(out)
    assert rep["results"]["reports"][0]["verdict"] == "satisfied"
    capsys.readouterr()


def test_essnorm_fixture_round_trip(tmp_path, capsys):
    path = cli.emit_fixture("essnorm-limsup", str(tmp_path))
    out = str(tmp_path / "out")
    assert cli.main(["--config", path, "--output-dir", out]) == 0
    rep = read_report(out)
    assert rep["results"]["sandwich"]["lower"] == 1.0
    assert rep["results"]["sandwich"]["upper"] == 1.0
    curve = {k: d for k, d in rep["results"]["curve"]}
    assert abs(curve[64] - 1.0) <= 0.05
    with open(os.path.join(out, "essnorm_curve.csv")) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "distance"]
    assert len(rows) == 1 + len(curve)
    capsys.readouterr()


def test_example_2_10_round_trip(tmp_path, capsys):
    path = cli.emit_fixture("example-2-10", str(tmp_path))
    out = str(tmp_path / "out")
    assert cli.main(["--config", path, "--output-dir", out]) == 0
    rep = read_report(out)
    checks = {c["check"]: c for c in rep["results"]["checks"]}
    assert rep["results"]["n_fail"] == 0
    assert checks["gch.estimate"]["estimate"] <= 4.0 + 1e-9
    assert checks["criteria.thm28i"]["verdict"] == "satisfied"
    # the carrier obstruction is a finding, not a battery failure
    assert checks["criteria.thm23b"]["verdict"] == "violated"
    capsys.readouterr()


def test_example_2_11_round_trip(tmp_path, capsys):
    path = cli.emit_fixture("example-2-11", str(tmp_path))
    out = str(tmp_path / "out")
    assert cli.main(["--config", path, "--output-dir", out]) == 0
    rep = read_report(out)
    checks = {c["check"]: c for c in rep["results"]["checks"]}
    assert rep["results"]["n_fail"] == 0
    assert checks["criteria.thm28i"]["verdict"] == "satisfied"
    capsys.readouterr()


# -- commands ---------------------------------------------------------------


def test_young_command_value(tmp_path, capsys):
    doc = {"schema_version": "1", "command": "young", "seed": 1,
           "young": {"phi": {"family": "power_scaled", "p": 2}},
           "params": {"x": 2.0}}
    out = str(tmp_path / "out")
    assert cli.main(["--config", write_doc(tmp_path, doc),
                     "--output-dir", out]) == 0
    rep = read_report(out)
    assert rep["results"]["value"] == 2.0
    assert rep["schema_version"] == "1"
    assert rep["seed"] == 1
    assert "timestamp" in rep["meta"]
    capsys.readouterr()


def test_norm_command_matches_library(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert cli.main(["--config",
                     write_doc(tmp_path, atomic_doc("norm")),
                     "--output-dir", out]) == 0
    rep = read_report(out)
    space, _ = sp.build_atomic_space([0.5, 0.25, 0.25])
    u = sp.fn_from_array(space, [2.0, 1.0, 0.5])
    direct = orlicz.lux_norm(young.power_scaled(2.0), u).value
    assert rep["results"]["lux_norm"] == pytest.approx(direct, rel=1e-12)
    capsys.readouterr()


def test_condexp_and_opnorm_commands(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert cli.main(["--config",
                     write_doc(tmp_path, atomic_doc("condexp")),
                     "--output-dir", out]) == 0
    rep = read_report(out)
    # singleton atom blocks: E is the identity on block values
    vals = [b["value"] for b in rep["results"]["blocks"]]
    assert vals == [2.0, 1.0, 0.5]
    assert cli.main(["--config",
                     write_doc(tmp_path, atomic_doc("opnorm")),
                     "--output-dir", out]) == 0
    rep = read_report(out)
    assert 0.0 < rep["results"]["lower_bound"] <= 2.0 + 1e-9
    capsys.readouterr()


def test_gch_command_bound_flag(tmp_path, capsys):
    doc = atomic_doc("gch", params={"samples": 60, "gch_C": 2.0})
    out = str(tmp_path / "out")
    assert cli.main(["--config", write_doc(tmp_path, doc),
                     "--output-dir", out]) == 0
    rep = read_report(out)
    assert rep["results"]["within_bound"] is True
    capsys.readouterr()


def test_criteria_thm28_cert_grid_validation(tmp_path, capsys):
    doc = atomic_doc("criteria", params={
        "which": "thm28", "cert_grid": {"hi": 1.0}})
    doc["young"] = {"phi": {"family": "power_scaled", "p": 4},
                    "psi": {"family": "power_scaled", "p": 2},
                    "theta": {"family": "power_scaled", "p": 4}}
    rc = cli.main(["--config", write_doc(tmp_path, doc),
                   "--output-dir", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert rc == 1
    assert "cert_grid" in captured.err


def test_essnorm_command_level_param(tmp_path, capsys):
    doc = {"schema_version": "1", "command": "essnorm", "seed": 7,
           "young": {"phi": {"family": "power_scaled", "p": 2}},
           "space": {"builder": "symbolic", "mass_fn": "1/(n*(n+1))",
                     "value_fn": "1 + 1/n", "n_max": 400},
           "params": {"ks": [1, 4], "eps": 1.6}}
    out = str(tmp_path / "out")
    assert cli.main(["--config", write_doc(tmp_path, doc),
                     "--output-dir", out]) == 0
    rep = read_report(out)
    assert rep["results"]["level"]["members"] == [1]
    assert rep["results"]["level"]["classification"] == "finitely-many-atoms"
    capsys.readouterr()


def test_verify_all_failing_bound_exits_one(tmp_path, capsys):
    doc = {"schema_version": "1", "command": "verify-all", "seed": 5,
           "young": {"phi": {"family": "exp_power", "p": 2}},
           "space": {"builder": "symmetric", "n_cells": 8},
           "weight": {"constant": 1.0},
           "params": {"gch_C": 1.0, "n_fns": 5, "gch_samples": 50}}
    rc = cli.main(["--config", write_doc(tmp_path, doc),
                   "--output-dir", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert rc == 1
    assert "failed" in captured.err
    rep = read_report(str(tmp_path / "out"))
    checks = {c["check"]: c for c in rep["results"]["checks"]}
    assert checks["gch.estimate"]["status"] == "fail"


# -- determinism and compare ------------------------------------------------


def test_reports_deterministic_for_fixed_seed(tmp_path, capsys):
    path = cli.emit_fixture("lpq-bounded", str(tmp_path))
    out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
    assert cli.main(["--config", path, "--seed", "7",
                     "--output-dir", out_a]) == 0
    assert cli.main(["--config", path, "--seed", "7",
                     "--output-dir", out_b]) == 0
    rep_a, rep_b = read_report(out_a), read_report(out_b)
    rep_a.pop("meta"), rep_b.pop("meta")
    assert json.dumps(rep_a, sort_keys=True) == \
        json.dumps(rep_b, sort_keys=True)
    assert cli.main(["--compare",
                     os.path.join(out_a, "report.json"),
                     os.path.join(out_b, "report.json")]) == 0
    capsys.readouterr()


def test_compare_detects_result_changes(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text(json.dumps({"results": {"x": 1}, "meta": {"t": "now"}}))
    b.write_text(json.dumps({"results": {"x": 1}, "meta": {"t": "later"}}))
    assert cli.main(["--compare", str(a), str(b)]) == 0
    b.write_text(json.dumps({"results": {"x": 2}, "meta": {"t": "later"}}))
    rc = cli.main(["--compare", str(a), str(b)])
    assert rc == 1
    capsys.readouterr()


def test_seed_flag_recorded(tmp_path, capsys):
    path = cli.emit_fixture("lpq-bounded", str(tmp_path))
    out = str(tmp_path / "out")
    assert cli.main(["--config", path, "--seed", "41",
                     "--output-dir", out]) == 0
    assert read_report(out)["seed"] == 41
    capsys.readouterr()


# -- argument handling ------------------------------------------------------


def test_exactly_one_mode_required(tmp_path, capsys):
    assert cli.main([]) == 1
    path = cli.emit_fixture("lpq-bounded", str(tmp_path))
    assert cli.main(["--config", path, "--compare", path, path]) == 1
    capsys.readouterr()


def test_bad_usage_and_missing_files_exit_one(tmp_path, capsys):
    assert cli.main(["--no-such-flag"]) == 1
    assert cli.main(["--emit-fixture", "nope"]) == 1
    assert cli.main(["--config", str(tmp_path / "missing.json")]) == 1
    captured = capsys.readouterr()
    assert "cannot read" in captured.err


def test_config_error_names_offending_path(tmp_path, capsys):
    doc = {"schema_version": "1", "command": "young", "seed": 1,
           "young": {"phi": {"family": "power_scaled"}},
           "params": {"x": 1.0}}
    rc = cli.main(["--config", write_doc(tmp_path, doc),
                   "--output-dir", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert rc == 1
    assert "young.phi" in captured.err


def test_help_exits_zero(capsys):
    assert cli.main(["--help"]) == 0
    captured = capsys.readouterr()
    assert "--emit-fixture" in captured.out


def test_jsonable_nonfinite():
    assert cli._jsonable(float("inf")) == "inf"
    assert cli._jsonable(float("-inf")) == "-inf"
    assert cli._jsonable(float("nan")) == "nan"
    assert cli._jsonable((1, 2.5)) == [1, 2.5]
