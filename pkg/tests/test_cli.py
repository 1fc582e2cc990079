import json
from pathlib import Path

import pytest

from dressedrabi.cli import ConfigError, config_digest, load_config, main, resolve_config


def write_config(tmp_path: Path, payload: dict) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


BASE = {
    "params": {"omega": 1.0, "omega0": 0.3, "beta": 0.1},
    "rates": {"Gamma": 0.0018, "gamma": 0.000228, "gamma_f": 0.0006},
    "n_cut": 30,
    "n_levels": 8,
}


def test_resolve_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        resolve_config({"paramz": {}}, {})
    with pytest.raises(ConfigError):
        resolve_config({"params": {"omega": 1.0, "Omega": 2.0}}, {})
    cfg = resolve_config({}, {})
    assert cfg["n_cut"] == 40 and cfg["params"]["omega0"] == 0.3


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(bad))


def test_seedless_flag_rejected(tmp_path, capsys):
    code = main(["validate", "--out", str(tmp_path), "--seedless"])
    assert code == 2
    assert "reserved" in capsys.readouterr().err


def test_validate_command(tmp_path, capsys):
    cfg = write_config(tmp_path, BASE)
    assert main(["validate", "--config", cfg, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "quasi-degenerate qubit: True" in out
    report = json.loads((tmp_path / "validate.json").read_text())
    assert report["report"]["beta_ok"] is True
    # degenerate-qubit note
    cfg0 = write_config(tmp_path, {**BASE, "params": {"omega": 1.0, "omega0": 0.0, "beta": 0.1}})
    assert main(["validate", "--config", cfg0, "--out", str(tmp_path)]) == 0
    assert "degenerate" in capsys.readouterr().out


def test_spectrum_command_and_roundtrip(tmp_path):
    cfg_path = write_config(tmp_path, {**BASE, "spectrum": {"keep": 8}})
    out1 = tmp_path / "run1"
    assert main(["spectrum", "--config", cfg_path, "--out", str(out1)]) == 0
    csv1 = (out1 / "spectrum.csv").read_bytes()
    assert csv1.startswith(b"# dressedrabi")
    assert b"\r" not in csv1  # LF endings

    meta = json.loads((out1 / "spectrum.meta.json").read_text())
    assert meta["config_digest"].startswith("sha256:")
    assert meta["wall_time_s"] >= 0

    # re-running the resolved config reproduces the table byte for byte
    resolved = meta["resolved_config"]
    cfg2 = tmp_path / "resolved.json"
    cfg2.write_text(json.dumps(resolved), encoding="utf-8")
    out2 = tmp_path / "run2"
    assert main(["spectrum", "--config", str(cfg2), "--out", str(out2)]) == 0
    assert (out2 / "spectrum.csv").read_bytes() == csv1


def test_spectrum_out_of_regime_proceeds_with_flag(tmp_path):
    # omega0 = 3 omega: validity flags it, the run still completes
    cfg_path = write_config(
        tmp_path,
        {**BASE, "params": {"omega": 1.0, "omega0": 3.0, "beta": 0.1}, "spectrum": {"keep": 6}},
    )
    out = tmp_path / "w3"
    assert main(["spectrum", "--config", cfg_path, "--out", str(out)]) == 0
    meta = json.loads((out / "spectrum.meta.json").read_text())
    assert meta["validity"]["quasi_degenerate"] is False


def test_truncation_check(tmp_path):
    cfg_path = write_config(
        tmp_path,
        {**BASE, "n_cut": 20, "check_truncation": True, "spectrum": {"keep": 6}},
    )
    out = tmp_path / "trunc"
    assert main(["spectrum", "--config", cfg_path, "--out", str(out)]) == 0
    meta = json.loads((out / "spectrum.meta.json").read_text())
    assert meta["truncation_shift"] < 1e-8


def test_spectrum_decoupled_rows_agree(tmp_path):
    cfg_path = write_config(
        tmp_path,
        {**BASE, "params": {"omega": 1.0, "omega0": 0.15, "beta": 0.0}, "spectrum": {"keep": 6}},
    )
    out = tmp_path / "b0"
    assert main(["spectrum", "--config", cfg_path, "--out", str(out)]) == 0
    rows = [
        line.split(",")
        for line in (out / "spectrum.csv").read_text().splitlines()
        if line and not line.startswith("#") and not line.startswith("index")
    ]
    for row in rows:
        e_exact, e_ad, e_sw = float(row[3]), float(row[4]), float(row[5])
        assert abs(e_exact - e_ad) < 1e-9
        assert abs(e_exact - e_sw) < 1e-9


def test_fidelity_command(tmp_path):
    cfg_path = write_config(
        tmp_path,
        {**BASE, "fidelity": {"n_states": 4, "grid": [{"omega0": 0.15, "beta": 0.1}]}},
    )
    out = tmp_path / "fid"
    assert main(["fidelity", "--config", cfg_path, "--out", str(out)]) == 0
    meta = json.loads((out / "fidelity.meta.json").read_text())
    summary = meta["summaries"][0]
    assert summary["mean_f_adiabatic"] >= summary["mean_f_sw"]


def test_relax_command(tmp_path):
    cfg_path = write_config(
        tmp_path,
        {
            **BASE,
            "rates": {"Gamma": 0.1, "gamma": 0.05, "gamma_f": 0.0},
            "relax": {"t_end_over_rate": 2.0, "dt": 0.02, "stride": 20,
                      "beta_grid": [0.05, 0.1, 0.2]},
        },
    )
    out = tmp_path / "relax"
    assert main(["relax", "--config", cfg_path, "--out", str(out)]) == 0
    meta = json.loads((out / "relax.meta.json").read_text())
    assert meta["dme_final_fidelity"] > 1 - 1e-9
    assert meta["sme_final_fidelity"] < 1 - 1e-6
    # the distance table carries the closed form and the small-coupling law
    rows = [
        line.split(",")
        for line in (out / "relax_distance.csv").read_text().splitlines()
        if line and not line.startswith("#") and not line.startswith("beta")
    ]
    for row in rows:
        beta, dist, closed, small = map(float, row)
        assert abs(dist - closed) < 1e-10
        assert abs(dist - small) < beta**4


def test_drive_command(tmp_path):
    cfg_path = write_config(
        tmp_path,
        {
            **BASE,
            "n_levels": 12,
            "rates": {"Gamma": 0.0018, "gamma": 0.000228, "gamma_f": 0.0},
            "drive": {"pump_amps": [0.0, 0.0009], "detuning": 0.0},
        },
    )
    out = tmp_path / "drive"
    assert main(["drive", "--config", cfg_path, "--out", str(out)]) == 0
    rows = [
        line.split(",")
        for line in (out / "drive.csv").read_text().splitlines()
        if line and not line.startswith("#") and not line.startswith("pump_amp")
    ]
    off, on = rows
    assert abs(float(off[4])) < 1e-10  # no pump, no excitation
    assert abs(float(on[4]) - 1.0) < 1e-6  # N_ss = 4 Omega_p^2 / Gamma^2 = 1
    assert float(on[6]) > 0.999  # coherent-state fidelity


def test_spectroscopy_command(tmp_path):
    cfg_path = write_config(
        tmp_path,
        {
            **BASE,
            "n_levels": 10,
            "spectroscopy": {"baselines": [0.5, 1.0], "grid_points": 11, "span": [0.5, 1.5]},
        },
    )
    out = tmp_path / "spec"
    assert main(["spectroscopy", "--config", cfg_path, "--out", str(out)]) == 0
    files = sorted(f.name for f in out.glob("*.csv"))
    assert "spectroscopy_combined.csv" in files
    assert sum(f.startswith("spectroscopy_scan_") for f in files) == 2
    meta = json.loads((out / "spectroscopy.meta.json").read_text())
    assert meta["failures"] == []
    assert len(meta["baselines"]) == 2


def test_numeric_failure_exit_code(tmp_path, capsys):
    # an absurd integrator step makes the relax run blow through the trace check
    cfg_path = write_config(
        tmp_path,
        {
            **BASE,
            "rates": {"Gamma": 0.1, "gamma": 0.05, "gamma_f": 0.0},
            "relax": {"t_end_over_rate": 50.0, "dt": 40.0, "stride": 1,
                      "beta_grid": [0.1]},
        },
    )
    code = main(["relax", "--config", cfg_path, "--out", str(tmp_path / "boom")])
    assert code == 3
    assert "numeric failure" in capsys.readouterr().err


def test_digest_is_stable():
    cfg = resolve_config({}, {})
    assert config_digest(cfg) == config_digest(json.loads(json.dumps(cfg)))
