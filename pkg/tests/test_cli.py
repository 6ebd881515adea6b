from __future__ import annotations

import csv
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from hardylip import cli
from hardylip.conformal import SchwarzChristoffelMap, sector_certificate
from hardylip.geometry import LipschitzGraph
from hardylip.suites import config_from_dict, load_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def wedge_cfg(tmp_path):
    LipschitzGraph.wedge(1.0).dump(tmp_path / "g.json")

    def make(**extra):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"graph": "g.json", **extra}))
        return path
    return make


def test_sc_fit_wedge(capsys):
    assert cli.main(["sc-fit", "--graph", str(CONFIGS / "wedge_graph.json")]) == 0
    out = capsys.readouterr()
    m = SchwarzChristoffelMap.from_dict(json.loads(out.out))
    assert m.exponents == pytest.approx((-0.5,))
    assert "residual" in out.err


def test_sc_fit_flat(capsys):
    assert cli.main(["sc-fit", "--graph", str(CONFIGS / "flat_graph.json")]) == 0
    assert json.loads(capsys.readouterr().out)["exponents"] == []


def test_sc_fit_zigzag_with_flags(capsys):
    code = cli.main(["sc-fit", "--graph", str(CONFIGS / "zigzag_graph.json"), "--pin-c1", "0",
                     "--base-value", "0,3"])
    assert code == 0
    m = SchwarzChristoffelMap.from_dict(json.loads(capsys.readouterr().out))
    g = LipschitzGraph.load(CONFIGS / "zigzag_graph.json")
    assert m.prevertices[0] == pytest.approx(0.0, abs=1e-12)
    assert sector_certificate(m, g.M).passed


def test_sc_fit_missing_graph(tmp_path):
    assert cli.main(["sc-fit", "--graph", str(tmp_path / "none.json")]) == 2


def test_config_validation(wedge_cfg, capsys):
    assert cli.main(["verify", "--config", str(wedge_cfg(suites=["nope"]))]) == 2
    assert cli.main(["verify", "--config", str(wedge_cfg(grids={"p": [1.0]}))]) == 2
    assert cli.main(["verify", "--config", str(wedge_cfg(grids={"y": [-1.0]}))]) == 2
    assert cli.main(["verify", "--config", str(wedge_cfg(suites=[]))]) == 2
    assert "no suites selected" in capsys.readouterr().err


def test_invalid_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["verify", "--config", str(bad)]) == 2


def test_thread_variable(wedge_cfg, tmp_path, monkeypatch):
    monkeypatch.setenv("HARDYLIP_THREADS", "many")
    assert cli.main(["verify", "--config", str(wedge_cfg(suites=["conformal"])), "--out", str(tmp_path)]) == 2
    monkeypatch.setenv("HARDYLIP_THREADS", "2")
    assert cli.main(["verify", "--config", str(wedge_cfg(suites=["conformal", "cauchy"])),
                     "--out", str(tmp_path)]) == 0


def test_report_round_trip(wedge_cfg, tmp_path):
    out = tmp_path / "run"
    cfg = wedge_cfg(suites=["caratheodory", "bounds_44_46"], grids={"j": [2, 3, 4], "tau": [0.5, 2.0]})
    assert cli.main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    data = json.loads((out / "report.json").read_text())
    assert set(data) >= {"artifact", "version", "schema_version", "timestamp", "config", "summary", "records"}
    assert data["config"]["grids"]["tau"] == [0.5, 2.0]
    keys = [(r["suite"], r["index"]) for r in data["records"]]
    assert keys == sorted(keys)
    assert cli.main(["report", "--input", str(out / "report.json"), "--format", "csv-bundle",
                     "--out", str(tmp_path / "csv")]) == 0
    with open(tmp_path / "csv" / "tau_sweep.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["quantity", "p", "tau", "measured", "bound"] and len(rows) > 1
    with open(tmp_path / "csv" / "caratheodory.csv") as fh:
        assert next(csv.reader(fh)) == ["j", "probe", "re", "im", "successive_diff"]
    assert cli.main(["report", "--input", str(out / "report.json"), "--format", "json",
                     "--out", str(tmp_path / "j")]) == 0
    assert json.loads((tmp_path / "j" / "report.json").read_text()) == data


def test_report_bad_input(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("[]")
    assert cli.main(["report", "--input", str(p), "--format", "json", "--out", str(tmp_path)]) == 2


def test_error_record_keeps_sample(wedge_cfg, monkeypatch):
    from hardylip import suites

    def broken(cfg, col):
        col.run("boom", lambda: 1 / 0)
    monkeypatch.setitem(suites._RUNNERS, "cauchy", broken)
    rep = suites.run_suite(load_config(wedge_cfg(suites=["cauchy"])))
    assert rep.summary == {"pass": 0, "fail": 0, "error": 1, "total": 1}
    assert "ZeroDivisionError" in rep.records[0].to_dict()["error"]
    assert rep.exit_status == 1


def test_config_presets():
    cfg = config_from_dict({"graph": {"preset": "wedge", "M": 0.5}, "suites": "conformal,cauchy"})
    assert cfg.graph.M == 0.5
    assert cfg.suites == ("cauchy", "conformal")


@pytest.mark.slow
@pytest.mark.parametrize("name", ["flat", "wedge"])
def test_full_suite_passes(name, tmp_path):
    code = cli.main(["verify", "--config", str(CONFIGS / f"{name}.json"), "--out", str(tmp_path), "--csv"])
    data = json.loads((tmp_path / "report.json").read_text())
    assert code == 0, [r for r in data["records"] if r["status"] != "pass"]
    assert data["summary"]["pass"] == data["summary"]["total"]
    assert (tmp_path / "tau_sweep.csv").exists() and (tmp_path / "caratheodory.csv").exists()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hardylip", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify" in res.stdout
    if shutil.which("hardylip"):
        assert subprocess.run(["hardylip", "--help"], capture_output=True).returncode == 0
