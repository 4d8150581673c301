import json
import math

import pytest

from relspin.cli import main, read_config_file, resolve_params
from relspin.constants import (
    BOHR_RADIUS_M,
    EPSILON0,
    SPEED_OF_LIGHT,
    field_to_au,
    field_to_si,
    intensity_to_w_cm2,
    length_to_au,
    length_to_si,
)


def _body(path):
    # everything except the timestamp line
    return path.read_text().splitlines()[1:]


def test_si_round_trips():
    for v in (1.0, 3.7e11, 2.2e14):
        assert math.isclose(field_to_si(field_to_au(v)), v, rel_tol=1e-12)
    assert math.isclose(length_to_si(length_to_au(0.159e-9)), 0.159e-9, rel_tol=1e-12)
    assert math.isclose(length_to_au(0.159e-9), 0.159e-9 / BOHR_RADIUS_M, rel_tol=1e-15)
    assert abs(length_to_au(0.159e-9) - 3.0047) < 5e-5


def test_intensity_conversion_against_si():
    # eps0 c E^2 at E = 1 a.u., computed in SI: 8.8541878128e-12 F/m, 299792458 m/s, 5.14220674763e11 V/m
    si_w_m2 = 8.8541878128e-12 * 299792458.0 * 5.14220674763e11**2
    au = EPSILON0 * SPEED_OF_LIGHT
    assert math.isclose(intensity_to_w_cm2(au), si_w_m2 * 1e-4, rel_tol=1e-8)


def test_table1_command(tmp_path, capsys):
    assert main(["table1", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "table1.json").read_text())
    assert doc["schema"] == 1 and doc["all_match"] and len(doc["rows"]) == 7
    assert main(["table1", "--out", str(tmp_path / "b"), "--set", "samples=10", "--seed", "5"]) == 0
    other = json.loads((tmp_path / "b" / "table1.json").read_text())
    assert [r["verdicts"] for r in other["rows"]] == [r["verdicts"] for r in doc["rows"]]


def test_invalid_input_exit_code(tmp_path, capsys):
    assert main(["fig1", "--out", str(tmp_path), "--set", "z_values=1,140"]) == 1
    assert main(["fig2", "--out", str(tmp_path), "--set", "amp_low=-3"]) == 1
    assert main(["classical", "--out", str(tmp_path), "--set", "particles=many"]) == 1
    assert main(["table1", "--out", str(tmp_path), "--set", "nonsense=1"]) == 1
    assert "error" in capsys.readouterr().err


def test_config_file_and_override_order(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nparticles = 12\nlarmor_ratio=0.03\n\n")
    values = read_config_file(cfg)
    params = resolve_params("classical", False, values, ["particles=8"])
    assert params["particles"] == 8 and params["larmor_ratio"] == 0.03
    assert resolve_params("classical", True, {}, [])["particles"] == 32
    cfg.write_text("no equals sign\n")
    with pytest.raises(ValueError):
        read_config_file(cfg)


def test_classical_command_is_deterministic(tmp_path, capsys):
    args = ["classical", "--set", "particles=8", "--set", "flat_periods=50", "--set", "ramp_periods=1"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("classical_summary.csv", "classical_trajectories.csv"):
        a, b = tmp_path / "a" / name, tmp_path / "b" / name
        assert _body(a) == _body(b)
        assert a.read_text().startswith("# relspin")
    lines = (tmp_path / "a" / "classical_summary.csv").read_text().splitlines()
    assert "# particles=8" in lines
    assert any(line.startswith("model,mean_rate_au") for line in lines)


def test_fig2_command_small(tmp_path, capsys):
    args = ["fig2", "--out", str(tmp_path), "--set", "backends=NonrelativisticPauli",
            "--set", "amp_count=3", "--set", "amp_high=100"]
    assert main(args) == 0
    rows = [r for r in (tmp_path / "fig2.csv").read_text().splitlines() if not r.startswith("#")]
    assert rows[0].startswith("backend,amplitude_au") and len(rows) == 4
    slopes = [r for r in (tmp_path / "fig2_slopes.csv").read_text().splitlines() if not r.startswith("#")]
    backend, slope, expected, used, ok = slopes[1].split(",")
    assert backend == "NonrelativisticPauli" and abs(float(slope) - 2) < 0.2 and ok == "True"


def test_fig1_command_small(tmp_path, capsys):
    args = ["fig1", "--out", str(tmp_path), "--set", "z_values=20", "--set", "points=48",
            "--set", "kinds=Pryce,Frenkel"]
    assert main(args) == 0
    rows = [r.split(",") for r in (tmp_path / "fig1.csv").read_text().splitlines() if not r.startswith("#")]
    assert rows[0] == ["Z", "kind", "spin_z", "spin_z_m_down", "variance_z", "norm_defect", "points", "box"]
    pryce = next(r for r in rows if r[1] == "Pryce")
    assert abs(float(pryce[2]) - 0.5) < 0.0025 and math.isclose(float(pryce[3]), -float(pryce[2]))
    frenkel = next(r for r in rows if r[1] == "Frenkel")
    assert frenkel[4] == ""
