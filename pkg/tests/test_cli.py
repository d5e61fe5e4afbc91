import json
import subprocess
import sys
from pathlib import Path

import pytest

from symineq.cli import EXIT_FLAGGED, EXIT_INVALID, EXIT_OK, main, manifest_config, run_config

ROOT = Path(__file__).resolve().parents[1]

SMALL = {
    "domain": "L-shape",
    "grid": 32,
    "trials": [
        {"tag": "rigid", "b": [1.0, 0.5], "label": "t"},
        {"tag": "radial", "phi": "bump", "R": 0.2, "center": [0.25, 0.25], "label": "bump"},
    ],
    "inequalities": ["subcritical(1.5)", "critical_LZ"],
    "pointwise": True,
    "rearrangement": {"c_dilation": 0.5},
}


def test_run_writes_reports(tmp_path):
    assert run_config(SMALL, tmp_path) == EXIT_OK
    rep = tmp_path / "reports"
    names = sorted(p.name for p in rep.iterdir())
    assert "sobolev.csv" in names and "pointwise_bump.csv" in names and "rearrangement_t.csv" in names
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["exit_status"] == 0 and man["config"]["grid"] == 32
    assert set(man["versions"]) >= {"numpy", "scipy", "python"}
    rows = (rep / "sobolev.csv").read_text().splitlines()
    assert len(rows) == 1 + 4


def test_manifest_rerun_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_config(SMALL, a)
    assert run_config(manifest_config(a / "manifest.json"), b) == EXIT_OK
    for f in (a / "reports").iterdir():
        assert f.read_bytes() == (b / "reports" / f.name).read_bytes()


@pytest.mark.parametrize("bad", [
    {"grid": 4},
    {"domain": "hexagon"},
    {"inequalities": ["zygmund(2,1,ii)"]},
    {"trials": [{"tag": "spiral"}]},
    {"bogus_key": 1},
    {"domain": [[0, 0], [2, 2], [2, 0], [0, 1]]},
    {"trials": [{"tag": "rigid", "label": "x"}, {"tag": "rigid", "label": "x"}]},
])
def test_invalid_inputs(tmp_path, bad, capsys):
    assert run_config(dict(SMALL, **bad), tmp_path) == EXIT_INVALID
    assert "invalid input" in capsys.readouterr().err
    assert not (tmp_path / "manifest.json").exists()


def test_failed_gate_flags(tmp_path):
    cfg = {"hardy": [{"name": "subcritical", "size": 3}], "gates": {"hardy_disc_err": 0.0}, "frostman": False}
    assert run_config(cfg, tmp_path) == EXIT_FLAGGED
    assert json.loads((tmp_path / "manifest.json").read_text())["exit_status"] == 2


def test_frostman_geometry_report(tmp_path):
    cfg = {"domain": "square", "grid": 32, "measure": {"kind": "frostman", "alpha": 1.5}}
    assert run_config(cfg, tmp_path) == EXIT_OK
    geo = json.loads((tmp_path / "reports" / "geometry.json").read_text())
    assert geo["frostman_alpha"] == 1.5 and geo["frostman_estimate_refined"] >= geo["frostman_estimate"]


def test_subcommands(tmp_path, capsys):
    assert main(["geom", "L-shape", "--grid", "32"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["area"] == 0.75
    assert main(["hardy", "subcritical", "--size", "3"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("member,params,")
    assert main(["verify", "supercritical(3)", "--domain", "square", "--grid", "32"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("inequality,trial,") and len(out) == 9
    assert main(["verify", "subcritical(5)", "--grid", "32"]) == EXIT_INVALID
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_INVALID


def test_shipped_configs_parse():
    from symineq.cli import Run, load_config

    for p in sorted((ROOT / "configs").glob("*.json")):
        Run(load_config(p))


def test_console_entry(tmp_path):
    r = subprocess.run([sys.executable, "-m", "symineq.cli", "geom", "square", "--grid", "16"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and '"perimeter": 4.0' in r.stdout
