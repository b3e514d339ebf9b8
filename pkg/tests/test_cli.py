import csv
import io
import json
import math
import subprocess
import sys

import pytest

from iwave import cli


BASE = {"rho_plus": 1.0, "rho_minus": 2.0, "d_plus": 1.0, "d_minus": 2.0, "omega_plus": 0.0, "omega_minus": 0.0,
        "sigma": 2.0, "g": 2.2, "c": 1.0}


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def irr(config_dir):
    return str(config_dir / "irrotational.json")


@pytest.fixture
def rot(config_dir):
    return str(config_dir / "rotational.json")


def test_critical_irrotational(irr, capsys):
    code, out, _ = run(["critical", irr], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["beta0"] == pytest.approx(5 / 6, abs=1e-15)
    assert data["alpha0"] == pytest.approx(1.0, abs=1e-15)


def test_critical_rotational(rot, capsys):
    code, out, _ = run(["critical", "--config", rot], capsys)
    assert code == 0 and json.loads(out)["alpha0"] == pytest.approx(1.1, abs=1e-14)


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(["critical", str(bad)], capsys)
    assert code == 2 and "malformed JSON" in err


@pytest.mark.parametrize("body,needle", [
    ({"params": {"rho_plus": 1.0}}, "config"),
    ({"params": {**BASE, "rho_plus": 5.0}}, "rho_plus"),
    ({"params": {}, "colour": 1}, "unknown"),
    ([1, 2], "object"),
])
def test_invalid_configs(tmp_path, capsys, body, needle):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(body))
    code, _, err = run(["critical", str(path)], capsys)
    assert code == 2 and needle in err


def test_missing_config(capsys):
    code, _, err = run(["critical"], capsys)
    assert code == 2 and "config" in err


def test_both_config_forms_rejected(irr, capsys):
    code, _, _ = run(["critical", irr, "--config", irr], capsys)
    assert code == 2


def test_unknown_flag_exits_2(irr):
    with pytest.raises(SystemExit) as exc:
        cli.main(["critical", irr, "--bogus"])
    assert exc.value.code == 2


def test_help_prints_schema(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--help"])
    assert exc.value.code == 0
    assert "rho_plus" in capsys.readouterr().out


def test_dispersion_csv_to_stdout(irr, capsys):
    code, out, _ = run(["dispersion", irr, "--kmax", "5", "--samples", "11", "--out", "-"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["k", "residual"] and len(rows) == 12
    assert float(rows[-1][0]) == 5.0


def test_dispersion_json_and_file(irr, tmp_path, capsys):
    target = tmp_path / "curve.csv"
    code, out, _ = run(["dispersion", irr, "--out", str(target)], capsys)
    assert code == 0 and json.loads(out)["roots"] == []
    assert target.read_text().startswith("k,residual\n")


def test_profile(rot, capsys):
    code, out, _ = run(["profile", rot, "--epsilon", "0.1", "--points", "64"], capsys)
    meta = json.loads(out)
    assert code == 0 and meta["polarity"] == "Elevation" and meta["epsilon"] == pytest.approx(0.1, rel=1e-12)


def test_profile_rejects_large_epsilon(rot, capsys):
    code, _, err = run(["profile", rot, "--epsilon", "0.9"], capsys)
    assert code == 2 and "epsilon" in err


def test_classify(rot, capsys):
    code, out, _ = run(["classify", rot, "--frozen-alpha0"], capsys)
    data = json.loads(out)
    assert code == 0 and data["frozen_alpha0"] is True and data["verdict"] == "Stable"


def test_spectrum_limiting_without_config(capsys):
    code, out, _ = run(["spectrum"], capsys)
    ev = json.loads(out)["eigenvalues"]
    assert code == 0 and len(ev) == 3 and abs(ev[0] + 1.25) <= 1e-6


def test_spectrum_qc0(irr, capsys):
    code, out, _ = run(["spectrum", irr, "--operator", "qc0"], capsys)
    assert code == 0 and json.loads(out)["tau_star"] > 0


def test_spectrum_qc0_needs_params(capsys):
    code, _, _ = run(["spectrum", "--operator", "qc0"], capsys)
    assert code == 2


@pytest.mark.parametrize("mode", ["--homoclinic", "--integrate"])
def test_reduce(rot, capsys, mode):
    code, out, _ = run(["reduce", rot, mode, "--span", "2", "--step", "0.5"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["X", "Q", "P", "H"] and len(rows) == 10


def test_options_from_config(tmp_path, capsys, config_dir):
    body = json.loads((config_dir / "irrotational.json").read_text())
    body["options"] = {"kmax": 3.0, "samples": 4, "out": "-"}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(body))
    code, out, _ = run(["dispersion", str(path)], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 5


def test_unknown_option_rejected(tmp_path, capsys, config_dir):
    body = json.loads((config_dir / "irrotational.json").read_text())
    body["options"] = {"colour": 1}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(body))
    code, _, err = run(["critical", str(path)], capsys)
    assert code == 2 and "colour" in err


def test_verify_jordan(rot, capsys):
    code, out, _ = run(["verify", rot, "--suite", "jordan"], capsys)
    data = json.loads(out)
    assert code == 0 and data["passed"] and {e["suite"] for e in data["entries"]} == {"jordan"}


def test_sweep_small_grid(tmp_path, capsys):
    grid = tmp_path / "g.json"
    grid.write_text(json.dumps({"varrho": [0.5], "d_ratio": [2.0], "r_fractions": [0.5], "c_sign": [1.0]}))
    code, out, _ = run(["sweep", "--grid", str(grid), "--table", "stability"], capsys)
    assert code == 0 and json.loads(out)["stability"]["points"] == 2


def test_threads_env_validated(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("IWAVE_THREADS", "zero")
    code, _, err = run(["sweep", "--table", "stability"], capsys)
    assert code == 2 and "IWAVE_THREADS" in err


def test_numerical_fault_exit_code(rot, capsys, monkeypatch):
    from iwave import stability
    from iwave.errors import NumericalFault

    def boom(*a, **k):
        raise NumericalFault("stability", "forced", 1.0)

    monkeypatch.setattr(stability, "classify", boom)
    code, _, err = run(["classify", rot], capsys)
    assert code == 3 and "[stability]" in err and "residual" in err


def test_dumps_is_deterministic():
    obj = {"b": [1.0, math.nan, 0.1], "a": {"y": True, "x": None}}
    text = cli.dumps(obj)
    assert text == cli.dumps(dict(reversed(list(obj.items()))))
    assert json.loads(text) == {"a": {"x": None, "y": True}, "b": [1.0, None, 0.1]}
    assert "0.10000000000000001" in text


def test_module_entry_point(irr):
    res = subprocess.run([sys.executable, "-m", "iwave", "critical", irr], capture_output=True, text=True)
    assert res.returncode == 0 and "beta0" in res.stdout
