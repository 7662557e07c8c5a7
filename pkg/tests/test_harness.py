import copy
import csv
import io
import json

import numpy as np
import pytest
import yaml

from lrfermi.errors import ConfigError
from lrfermi.harness.cli import main
from lrfermi.harness.config import load_scenario, parse_scenario, set_path
from lrfermi.harness.runner import OUT_ENV, parse_axis, run_scenario, sweep
from lrfermi.harness.suites import CheckRecord, VerificationReport, _check, picard_ratio, verify

SMALL = {
    "name": "bcs-small",
    "model": {"kind": "bcs", "spins": ["up", "down"], "hopping": {"1": [-0.5, 0], "-1": [-0.5, 0]}, "gamma": 1.0},
    "ladder": [2],
    "state": {"kind": "pure-product", "vectors": [[0.955336489125606, 0, 0, 0, 0, 0, 0.29552020666134, 0]]},
    "time": {"stop": 0.3, "steps": 4},
    "methods": ["ode", "exact"],
    "outputs": ["energy", {"name": "n0up", "terms": [{"coef": [1, 0], "ops": ["c+ 0 up", "c- 0 up"]}]}],
}


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def _write(tmp_path, doc, name="s.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return path


@pytest.mark.parametrize("key, value, where", [
    ("model.kind", "ising", "model.kind"),
    ("ladder", [], "ladder"),
    ("state.kind", "thermal", "state.kind"),
    ("methods", ["euler"], "methods"),
    ("time.steps", 0, "time"),
    ("solver", {"tolerance": 1e-8, "bogus": 1}, "solver"),
])
def test_config_errors_name_the_field(key, value, where):
    with pytest.raises(ConfigError) as exc:
        parse_scenario(set_path(SMALL, key, value))
    assert where in str(exc.value)


def test_set_path_does_not_mutate():
    doc = copy.deepcopy(SMALL)
    new = set_path(doc, "model.gamma", 0.5)
    assert new["model"]["gamma"] == 0.5 and doc == SMALL


def test_parse_axis():
    assert parse_axis("model.gamma=0,0.5,1") == ("model.gamma", [0, 0.5, 1])
    with pytest.raises(ConfigError):
        parse_axis("model.gamma")
    with pytest.raises(ConfigError):
        parse_axis("=1,2")


def test_run_is_deterministic():
    sc = parse_scenario(SMALL)
    a, b = run_scenario(sc), run_scenario(sc)
    assert a.csv_text() == b.csv_text()
    rows = _rows(a.csv_text())
    assert {r["method"] for r in rows} == {"ode", "exact"}
    assert {r["observable"] for r in rows} == {"energy", "n0up"}
    diag = json.loads(a.json_text())["runs"]
    ode = [d for d in diag if d["method"] == "ode"][0]
    assert ode["energy_drift"] < 1e-6 and ode["normalization_error"] < 1e-9


def test_zero_coupling_meanfield_equals_exact():
    sc = parse_scenario(set_path(SMALL, "model.gamma", 0.0))
    rows = _rows(run_scenario(sc).csv_text())
    vals = {}
    for r in rows:
        if r["observable"] == "n0up":
            vals.setdefault(r["method"], []).append(float(r["re"]))
    np.testing.assert_allclose(vals["ode"], vals["exact"], atol=1e-9)


def test_cli_run_writes_outputs(tmp_path, monkeypatch, capsys):
    cfg = _write(tmp_path, SMALL)
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env-out"))
    assert main(["run", "--config", str(cfg)]) == 0
    assert (tmp_path / "env-out" / "bcs-small.csv").exists()
    assert (tmp_path / "env-out" / "bcs-small.json").exists()
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "explicit")]) == 0
    assert (tmp_path / "explicit" / "bcs-small.csv").read_text() == (tmp_path / "env-out" / "bcs-small.csv").read_text()


def test_cli_config_errors_exit_two(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == 2
    bad = _write(tmp_path, set_path(SMALL, "model.kind", "ising"))
    assert main(["run", "--config", str(bad)]) == 2
    assert "model.kind" in capsys.readouterr().err
    good = _write(tmp_path, SMALL, "good.yaml")
    assert main(["sweep", "--config", str(good), "--axis", "nonsense"]) == 2
    assert main(["sweep", "--config", str(good), "--axis", "model.gamma=1", "--threads", "0"]) == 2


def test_sweep_threads_do_not_change_output(tmp_path):
    doc = copy.deepcopy(SMALL)
    one = sweep(doc, "model.gamma", [0.0, 0.5, 1.0], tmp_path / "seq", threads=1)
    many = sweep(doc, "model.gamma", [0.0, 0.5, 1.0], tmp_path / "par", threads=3)
    assert one.read_bytes() == many.read_bytes()
    names = [r["scenario"] for r in _rows(one.read_text())]
    assert names[0] == "bcs-small[model.gamma=0.0]" and names[-1] == "bcs-small[model.gamma=1.0]"
    assert len(list((tmp_path / "par").glob("*.json"))) == 3


def test_bundled_scenarios_parse():
    from importlib.resources import files

    paths = sorted(p for p in files("lrfermi.harness").joinpath("scenarios").iterdir() if p.name.endswith(".yaml"))
    assert len(paths) >= 3
    for p in paths:
        sc = load_scenario(p)
        assert sc.ladder


def test_verify_cli_and_records(tmp_path, capsys):
    assert main(["verify", "--suite", "classical", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS classical")
    rows = _rows((tmp_path / "verify-seed0.csv").read_text())
    assert rows and all(r["passed"] == "True" for r in rows)
    with pytest.raises(KeyError):
        verify("nope")


def test_check_records_and_report():
    ok = _check("s", "c", (1,), 1.0, 1.0, "equal sides pass")
    strict = _check("s", "c", (1,), 1.0, 1.0, "strict needs lhs < rhs", strict=True)
    tol = _check("s", "c", "x", 1.0 + 1e-13, 1.0, "within tolerance", 1e-12)
    assert ok.passed and not strict.passed and tol.passed
    rep = VerificationReport([ok, strict])
    assert not rep.ok and rep.failures == [strict]
    assert rep.summary()["total"] == {"passed": 1, "failed": 1}
    assert isinstance(rep.records[0], CheckRecord)


def test_picard_ratio_ignores_first_iterate_and_floor():
    assert picard_ratio([[1.0, 0.9, 0.3, 0.1]], 1e-12) == pytest.approx(1 / 3)
    assert picard_ratio([[1.0, 1e-3, 1e-13, 1e-13]], 1e-12) == pytest.approx(1e-10)


def test_order_parameter_output_labels():
    sc = parse_scenario(set_path(SMALL, "outputs", ["order_parameters"]))
    rows = _rows(run_scenario(sc).csv_text())
    assert {r["observable"] for r in rows} == {"e[pairing*]", "e[pairing]"}
    assert {r["variant"] for r in rows} == {"e-density", "exact"}
