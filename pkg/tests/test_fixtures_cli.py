import csv
import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from localmu.cli import main
from localmu.fixtures import (BUILTINS, FIXTURE_SCHEMA, FixtureError, fixture_from_json,
                              load_fixture, validate_fixture_json)
from localmu.harness import RunConfig, run

DOCS = Path(__file__).resolve().parents[1] / "docs"


def test_load_builtin_fixtures():
    fx = load_fixture("ex-two-balls")
    assert fx.kind == "counterexample" and fx.space.label == "linf"
    assert np.array_equal(fx.map([0.5, 10]), [-0.5, 10])
    fx = load_fixture("ex-star-closed")
    assert np.allclose(fx.map([1, 0]), [1, np.sin(1)])


def test_unknown_fixture_lists_choices():
    with pytest.raises(FixtureError) as info:
        load_fixture("no-such-fixture")
    for name in BUILTINS:
        assert name in str(info.value)


def test_docs_schema_matches_code():
    assert json.loads((DOCS / "fixture.schema.json").read_text()) == FIXTURE_SCHEMA


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_fixture_json_roundtrip(name, tmp_path):
    fx = load_fixture(name)
    data = fx.to_json()
    validate_fixture_json(data)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(data))
    again = load_fixture(str(path))
    pts = fx.domain.sample(np.random.default_rng(0), 200)
    assert np.array_equal(again.domain.contains_fn(pts), fx.domain.contains_fn(pts))
    assert np.array_equal(again.map(pts), fx.map(pts))


@pytest.mark.parametrize("path", sorted((DOCS / "examples").glob("*.json")))
def test_doc_examples_are_valid(path):
    fx = load_fixture(str(path))
    assert fx.name == path.stem


def test_malformed_fixture_reports_path():
    data = load_fixture("rotation-disc").to_json()
    data["space"]["norm"] = 7
    with pytest.raises(FixtureError, match="space"):
        fixture_from_json(data)
    with pytest.raises(FixtureError):
        fixture_from_json({"name": "x"})


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(fixture="ex-two-balls", suite="nope")
    with pytest.raises(ValueError):
        RunConfig(fixture="ex-two-balls", tol_abs=-1)
    with pytest.raises(ValueError):
        RunConfig(fixture="ex-two-balls", samples=0)


# -- CLI -----------------------------------------------------------------------

def cli(tmp_path, *args):
    out = tmp_path / "report.json"
    code = main([*args, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_cli_extend_signed_perm(tmp_path):
    code, rep = cli(tmp_path, "extend", "--fixture", "signed-perm-star", "--seed", "7")
    assert code == 0 and rep["verdict"] == "pass"
    assert all(c["passed"] for c in rep["checks"])
    defects = rep["results"]["extension"]["defects"]
    assert max(defects.values()) <= 1e-9


def test_cli_counterexample_two_balls(tmp_path):
    code, rep = cli(tmp_path, "counterexample", "ex-two-balls")
    assert code == 0
    checks = {c["name"]: c for c in rep["checks"]}
    assert checks["counterexamples.isometry_defect"]["value"] <= 1e-9
    assert checks["counterexamples.affine_fit_residual"]["passed"]


def test_cli_forced_star_closed_fails(tmp_path):
    code, rep = cli(tmp_path, "extend", "--fixture", "ex-star-closed", "--force")
    assert code == 1 and rep["verdict"] == "fail"
    probes = rep["results"]["extension"]["probes"]
    at = {tuple(p["point"]): p["agreement"] for p in probes}
    assert at[(1.0, 0.0)] == pytest.approx(0.8414709848, abs=1e-9)


def test_cli_refusal_without_force(tmp_path, capsys):
    code, rep = cli(tmp_path, "extend", "--fixture", "ex-star-closed")
    assert code == 2 and rep is None
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("args", [
    ["extend", "--fixture", "nope"],
    ["extend", "--fixture", "ex-two-balls", "--tol-abs", "-1"],
    ["counterexample", "rotation-disc"],
    ["counterexample"],
])
def test_cli_config_errors_exit_2(tmp_path, args, capsys):
    assert main(args) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_cli_bad_fixture_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify-isometry", "--fixture", str(bad)]) == 2


def test_cli_list_fixtures(capsys):
    assert main(["list-fixtures"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in BUILTINS)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_exit_code_contract(name, tmp_path):
    fx = load_fixture(name)
    if fx.kind == "counterexample":
        code, _ = cli(tmp_path, "counterexample", name)
        assert code == 0
        code, _ = cli(tmp_path, "extend", "--fixture", name, "--force")
        assert code == 1
    else:
        for sub in ("verify-isometry", "midpoint", "extend"):
            code, _ = cli(tmp_path, sub, "--fixture", name)
            assert code == 0, sub


def test_report_schema_and_determinism(tmp_path):
    schema = json.loads((DOCS / "report.schema.json").read_text())
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["report", "--seed", "3", "--out", str(a)]) == 0
    assert main(["report", "--seed", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    jsonschema.validate(json.loads(a.read_text()), schema)


def test_stdout_report_and_csv(tmp_path, capsys):
    path = tmp_path / "defects.csv"
    assert main(["verify-isometry", "--fixture", "rotation-disc", "--samples", "50",
                 "--csv", str(path)]) == 0
    captured = capsys.readouterr()
    rep = json.loads(captured.out)
    assert rep["config"]["samples"] == 50
    assert "[PASS]" in captured.err
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["check", "sample", "defect"]
    assert len(rows) > 50


def test_timing_only_when_requested(tmp_path):
    _, rep = cli(tmp_path, "verify-isometry", "--fixture", "rotation-disc")
    assert "wall_time" not in rep
    _, rep = cli(tmp_path, "verify-isometry", "--fixture", "rotation-disc", "--timing")
    assert rep["wall_time"] >= 0


def test_run_accepts_fixture_object():
    fx = load_fixture("convex-maxball")
    rep = run(RunConfig(fixture="convex-maxball", suite="isometry", samples=100), fx)
    assert rep.passed
