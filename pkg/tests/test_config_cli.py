import math

import numpy as np
import pytest

from lattice_qnd.cli import main
from lattice_qnd.config import ConfigError, RunConfig, apply_overrides, parse_config
from lattice_qnd.heating_retention import RetentionPoint, retention_fraction, write_retention_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    lines = text.rstrip("\n").split("\n")
    header = lines[0].split(",")
    return header, np.array([[float(x) for x in line.split(",")] for line in lines[1:]])


# -- config -------------------------------------------------------------------

def test_config_round_trip():
    cfg = apply_overrides(RunConfig(), ["detection.probe_power_nW=14.3",
                                        "sequence.projection_noise=true",
                                        "lattice.depth_unit=Er"])
    text = cfg.serialize()
    again = parse_config(text)
    assert again == cfg
    assert again.serialize() == text


def test_defaults_build_models():
    cfg = RunConfig().validate()
    assert cfg.detection_model().detected_power == pytest.approx(5.16e-9)
    assert cfg.lattice_model().depth_kelvin == pytest.approx(1e-4)
    assert cfg.modulation_model().frequency == pytest.approx(90e6)


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match=r"line 3: \[detection\] bogus"):
        parse_config("[detection]\nprobe_power_nW = 5\nbogus = 1\n")
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config("[nope]\nx = 1\n")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("[modulation]\ndepth_rad = abc\n")
    with pytest.raises(ConfigError):
        apply_overrides(RunConfig(), ["detection.probe_power_nW"])


def test_invalid_values_rejected():
    with pytest.raises(ConfigError):
        apply_overrides(RunConfig(), ["detection.efficiency=2"]).validate()
    with pytest.raises(ConfigError):
        apply_overrides(RunConfig(), ["populations.preset=foo"]).validate()


# -- CLI: exit codes ----------------------------------------------------------

def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["cycle", "--trials", "3"])  # Monte Carlo needs --seed
    assert exc.value.code == 2


def test_config_error_exit_3(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[geometry]\ncloud_radius_um = 10\nwaist = 3\n")
    code, out, err = run(capsys, "phase-spectrum", "--config", str(path))
    assert code == 3 and out == ""
    assert "line 3" in err and "waist" in err


def test_runtime_error_exit_4(tmp_path, capsys):
    missing = tmp_path / "none.csv"
    code, _, err = run(capsys, "retention", "--fit", str(missing))
    assert code == 4 and "error: " in err


# -- CLI: commands ------------------------------------------------------------

def test_phase_spectrum(capsys):
    code, out, _ = run(capsys, "phase-spectrum")
    assert code == 0
    header, data = table(out)
    assert header == ["detuning_MHz", "phase_unpolarized_mrad", "phase_stretched_mrad"]
    assert data.shape == (601, 3)
    assert data[0, 0] == -150 and data[-1, 0] == 150
    row = data[np.argmin(np.abs(data[:, 0] - 90))]
    assert 10 <= row[1] <= 60 and 10 <= row[2] <= 60


def test_phase_spectrum_no_atoms(capsys):
    code, out, _ = run(capsys, "phase-spectrum", "--set", "populations.atom_number=0")
    _, data = table(out)
    assert code == 0 and np.all(data[:, 1:] == 0)


def test_csv_formatting(capsys, tmp_path):
    path = tmp_path / "o.csv"
    code, out, _ = run(capsys, "phase-spectrum", "--span-MHz", "5", "--out", str(path))
    raw = path.read_bytes()
    assert code == 0 and out == ""
    assert raw.endswith(b"\n") and b"\r" not in raw
    assert all(line == line.rstrip() for line in raw.decode().split("\n"))


def test_retention(capsys):
    code, out, err = run(capsys, "retention")
    header, data = table(out)
    assert code == 0 and header == ["depth_Er", "depth_mK", "beta_model"]
    assert data[0, 2] == 0.0
    beta = data[np.isclose(data[:, 1], 0.1), 2][0]
    assert 0.92 <= beta <= 0.96
    assert "recoil_energy_J" in err


def test_retention_fit_round_trip(capsys, tmp_path):
    depths = np.geomspace(20, 400, 8)
    pts = [RetentionPoint(float(d), float(retention_fraction(d, 77.0)), 0.01) for d in depths]
    path = tmp_path / "data.csv"
    write_retention_csv(path, pts)
    code, _, err = run(capsys, "retention", "--fit", str(path))
    assert code == 0
    fitted = float(err.split("n_gamma_fit=")[1].split()[0])
    assert fitted == pytest.approx(77.0, rel=1e-6)


def test_snr_map(capsys):
    code, out, err = run(capsys, "snr-map", "--omega-MHz", "20:200:10", "--depth", "1.5:3.2:9")
    header, data = table(out)
    assert code == 0 and header == ["frequency_MHz", "depth_rad", "snr"]
    assert data.shape == (90, 3)
    depth = float(err.split("depth_rad=")[1].split()[0])
    assert 2.35 <= depth <= 2.45
    assert "sideband_loss_90MHz_2.4rad" in err


def test_noise_psd(capsys):
    code, out, err = run(capsys, "noise-psd", "--seed", "1", "--powers", "5,50", "--trials", "300")
    header, data = table(out)
    assert code == 0 and header[0] == "detected_power_nW"
    assert data[0, 0] == 5 and data[0, 1] == pytest.approx(8e-11, rel=0.01)
    # model column: two-pulse shot-noise-only rms, 1/sqrt(P)
    assert data[0, 2] / data[1, 2] == pytest.approx(math.sqrt(10), rel=1e-12)
    assert "shot_noise_crossover_detected_nW" in err


def test_cycle_deterministic_across_jobs(capsys):
    args = ["cycle", "--seed", "7", "--N", "1000,10000", "--p", "0.5", "--trials", "20"]
    _, one, _ = run(capsys, *args, "--jobs", "1")
    _, four, _ = run(capsys, *args, "--jobs", "4")
    assert one == four
    _, other, _ = run(capsys, "cycle", "--seed", "8", "--N", "1000,10000", "--p", "0.5",
                      "--trials", "20")
    assert other != one
    assert one.count("\n") == 41


def test_cycle_two_pulse_summary(capsys):
    code, out, err = run(capsys, "cycle", "--seed", "3", "--trials", "50")
    assert code == 0 and "rms_phase" in err
    assert out.splitlines()[0].startswith("seed,N_true")
