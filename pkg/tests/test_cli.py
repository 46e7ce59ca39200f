"""CLI surface: schemas, presets, determinism, exit codes, config handling."""

import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from qamp.cli import main, parse_input, resolve_config
from qamp.errors import ConfigError


@pytest.fixture
def runner():
    return CliRunner()


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, data


class TestInputParsing:
    def test_kinds(self):
        assert parse_input("coherent:2,1").alpha0 == 2.0 + 1.0j
        assert parse_input("coherent:3").alpha0 == 3.0 + 0.0j
        assert parse_input("fock:5").n0 == 5
        f = parse_input("squeezed:1,0.5")
        assert f.r == 1.0 and f.phi == 0.5
        assert parse_input("thermal:2.5").nbar == 2.5

    def test_bad_specs(self):
        for spec in ("cat:1", "fock:1.5", "coherent:a,b", "thermal:"):
            with pytest.raises(ConfigError):
                parse_input(spec)


class TestConfigResolution:
    def test_defaults_echoed(self):
        cfg = resolve_config("gain", None, None, {})
        assert cfg["samples"] == 201
        assert cfg["command"] == "gain"
        assert cfg["input"] == "coherent:1,0"

    def test_preset_merge_and_override(self):
        cfg = resolve_config("gain", "fig1", None, {"samples": 11})
        assert cfg["sweep_aprime"] == [2.0, 3.0, 4.0, 5.5]
        assert cfg["tau0"] == 5.0
        assert cfg["samples"] == 11

    def test_preset_command_mismatch(self):
        with pytest.raises(ConfigError):
            resolve_config("gain", "fig4", None, {})

    def test_thermal_input_tracks_occupation(self):
        cfg = resolve_config("thermal", None, None, {"nb": 7.0})
        assert cfg["input"] == "thermal:7"

    def test_validation(self):
        with pytest.raises(ConfigError):
            resolve_config("gain", None, None, {"samples": 1})
        with pytest.raises(ConfigError):
            resolve_config("gain", None, None, {"tau_start": -1.0})
        with pytest.raises(ConfigError):
            resolve_config("gain", None, None, {"format": "xml"})
        with pytest.raises(ConfigError):
            resolve_config("thermal", None, None, {"input": "coherent:1,0"})
        with pytest.raises(ConfigError):
            resolve_config("wigner", None, None, {"input": "fock:3"})

    def test_config_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"aprime": 2.5, "tau_end": 3.0}))
        cfg = resolve_config("gain", None, str(path), {})
        assert cfg["aprime"] == 2.5
        with pytest.raises(ConfigError):
            path.write_text(json.dumps({"apriem": 2.5}))
            resolve_config("gain", None, str(path), {})


class TestGainCommand:
    def test_schema_and_values(self, runner, tmp_path):
        out = tmp_path / "g"
        result = runner.invoke(main, ["gain", "--aprime", "2", "--tau0", "5",
                                      "--tau-end", "14", "--samples", "29",
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        header, data = read_csv(out.with_suffix(".csv"))
        assert header == ["tau", "G", "W"]
        row10 = data[np.isclose(data[:, 0], 10.0)][0]
        assert row10[1] == pytest.approx(1.0, abs=1e-12)
        assert data[-1, 1] > 1.0

    def test_sidecar_echoes_config(self, runner, tmp_path):
        out = tmp_path / "g"
        runner.invoke(main, ["gain", "--out", str(out)])
        sidecar = json.loads(out.with_suffix(".json").read_text())
        assert sidecar["config"]["samples"] == 201
        assert sidecar["config"]["command"] == "gain"
        assert sidecar["cells"][0]["params"]["aprime"] == 1.0

    def test_negative_tau_start_rejected(self, runner, tmp_path):
        result = runner.invoke(main, ["gain", "--tau-start", "-1",
                                      "--out", str(tmp_path / "x")])
        assert result.exit_code == 2

    def test_byte_determinism(self, runner, tmp_path):
        args = ["gain", "--aprime", "1.3", "--tau0", "2", "--samples", "37"]
        a = tmp_path / "a"
        b = tmp_path / "b"
        runner.invoke(main, args + ["--out", str(a)])
        runner.invoke(main, args + ["--out", str(b)])
        assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()

    def test_json_format(self, runner, tmp_path):
        out = tmp_path / "g"
        result = runner.invoke(main, ["gain", "--format", "json", "--samples", "5",
                                      "--out", str(out)])
        assert result.exit_code == 0
        payload = json.loads(out.with_suffix(".json").read_text())
        assert "columns" in payload["cells"][0]
        assert len(payload["cells"][0]["columns"]["G"]) == 5


class TestNoiseCommand:
    def test_schema_and_zeros(self, runner, tmp_path):
        out = tmp_path / "n"
        result = runner.invoke(main, ["noise", "--aprime", "0.5", "--nb", "0.01",
                                      "--tau0", "4", "--tau-end", "8",
                                      "--samples", "17", "--out", str(out)])
        assert result.exit_code == 0, result.output
        header, data = read_csv(out.with_suffix(".csv"))
        assert header == ["tau", "delta", "added_noise", "out_fluct", "m"]
        assert data[0, 1] == 0.0 and data[0, 2] == 0.0 and data[0, 4] == 0.0
        assert data[0, 3] == pytest.approx(0.5)
        assert np.all(np.diff(data[:, 1]) >= 0.0)


class TestMandelCommand:
    def test_summary_and_initial_value(self, runner, tmp_path):
        out = tmp_path / "m"
        result = runner.invoke(main, ["mandel", "--aprime", "1", "--nb", "0.01",
                                      "--input", "fock:5", "--tau-end", "4",
                                      "--samples", "41", "--out", str(out)])
        assert result.exit_code == 0, result.output
        header, data = read_csv(out.with_suffix(".csv"))
        assert header == ["tau", "Q", "G"]
        assert data[0, 1] == pytest.approx(-1.0)
        sidecar = json.loads(out.with_suffix(".json").read_text())
        summary = sidecar["cells"][0]["summary"]
        assert 0.0 < summary["tau_q"] < 4.0
        assert summary["gain_at_tau_q"] < 2.0


class TestSqueezingCommand:
    def test_schema_and_retention(self, runner, tmp_path):
        out = tmp_path / "s"
        result = runner.invoke(main, ["squeezing", "--preset", "fig3",
                                      "--samples", "33", "--out", str(out)])
        assert result.exit_code == 0, result.output
        header, data = read_csv(out.with_suffix(".csv"))
        assert header == ["tau", "var_u", "var_v", "retained", "G"]
        assert data[0, 1] == pytest.approx(0.5 * math.exp(-2.0), rel=1e-10)
        assert data[0, 3] == 1.0


class TestThermalCommand:
    def test_schema_kelvin_and_ratio(self, runner, tmp_path):
        out = tmp_path / "t"
        result = runner.invoke(main, ["thermal", "--aprime", "1", "--nb", "1000",
                                      "--omega0", "1e14", "--tau0", "8",
                                      "--tau-end", "16", "--samples", "17",
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        header, data = read_csv(out.with_suffix(".csv"))
        assert header == ["tau", "mean_n", "T", "S", "N2_over_N1"]
        assert data[0, 1] == pytest.approx(1000.0, rel=1e-9)
        assert data[0, 2] > 1e5  # Kelvin scale for omega0 = 1e14 rad/s
        assert data[0, 4] == pytest.approx(1000.0 / 1001.0, rel=1e-9)
        assert data[-1, 4] > 1.0

    def test_vacuum_entropy_zero(self, runner, tmp_path):
        out = tmp_path / "t0"
        result = runner.invoke(main, ["thermal", "--aprime", "0.5", "--nb", "0",
                                      "--input", "thermal:0", "--tau0", "8",
                                      "--tau-end", "2", "--samples", "3",
                                      "--out", str(out)])
        assert result.exit_code == 0
        _, data = read_csv(out.with_suffix(".csv"))
        assert data[0, 3] == 0.0


class TestWignerCommand:
    def test_grid_files(self, runner, tmp_path):
        out = tmp_path / "w"
        result = runner.invoke(main, ["wigner", "--aprime", "0.1", "--nb", "0.1",
                                      "--tau0", "4", "--input", "squeezed:1,0",
                                      "--times", "0,4", "--points", "96",
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        for t in ("0", "4"):
            header, data = read_csv(tmp_path / f"w_tau{t}.csv")
            assert header == ["alpha_re", "alpha_im", "value"]
            assert len(data) == 96 * 96
        sidecar = json.loads(out.with_suffix(".json").read_text())
        for cell in sidecar["cells"]:
            assert cell["normalization"] == pytest.approx(1.0, abs=1e-3)

    def test_bad_times(self, runner, tmp_path):
        result = runner.invoke(main, ["wigner", "--times", "a,b",
                                      "--out", str(tmp_path / "w")])
        assert result.exit_code == 2


class TestOracleCommand:
    def test_report(self, runner, tmp_path):
        out = tmp_path / "o"
        result = runner.invoke(main, ["oracle", "--aprime", "0.5", "--nb", "0.01",
                                      "--tau0", "1", "--input", "coherent:1,0",
                                      "--tau-end", "2", "--step", "5e-4",
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads(out.with_suffix(".json").read_text())["reports"][0]
        assert report["truncation_safe"] is True
        assert report["max_trace_drift"] < 1e-9
        assert report["analytic_deltas"]["mean_n"] < 1e-6
        assert len(report["series"]["tau"]) == len(report["series"]["mean_n"])

    def test_truncation_abort_exit_code(self, runner, tmp_path):
        result = runner.invoke(main, ["oracle", "--aprime", "2", "--nb", "0.01",
                                      "--tau0", "0", "--input", "coherent:2,0",
                                      "--dim", "14", "--tau-end", "3",
                                      "--step", "4e-4", "--out", str(tmp_path / "o")])
        assert result.exit_code == 3


class TestRunPresets:
    def test_fig1(self, runner, tmp_path):
        out = tmp_path / "fig1"
        result = runner.invoke(main, ["run", "--preset", "fig1", "--samples", "29",
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        for a in ("2", "3", "4", "5.5"):
            assert (tmp_path / f"fig1_aprime{a}.csv").exists()

    def test_fig3_bundles_wigner(self, runner, tmp_path):
        out = tmp_path / "fig3"
        result = runner.invoke(main, ["run", "--preset", "fig3", "--samples", "17",
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.with_suffix(".csv").exists()
        assert (tmp_path / "fig3_wigner_tau4.csv").exists()

    def test_run_needs_preset(self, runner):
        result = runner.invoke(main, ["run"])
        assert result.exit_code == 2

    def test_plot_writes_png(self, runner, tmp_path):
        out = tmp_path / "g"
        result = runner.invoke(main, ["gain", "--samples", "9", "--plot",
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.with_suffix(".png").exists()


class TestThreadCap:
    def test_env_cap(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("QAMP_THREADS", "1")
        out = tmp_path / "g"
        result = runner.invoke(main, ["run", "--preset", "fig1", "--samples", "9",
                                      "--out", str(out)])
        assert result.exit_code == 0
        monkeypatch.setenv("QAMP_THREADS", "zero")
        result = runner.invoke(main, ["gain", "--samples", "9",
                                      "--out", str(tmp_path / "h")])
        assert result.exit_code == 2
