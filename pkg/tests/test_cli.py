"""Command-line front end: config validation, outputs, determinism, exit codes."""

import numpy as np
import pytest

from twpasim import (
    FrequencyGrid,
    TouchstoneDocument,
    abcd_to_s,
    build_supercell,
    default_spec,
    write_touchstone,
)
from twpasim.cli import main

SMALL_DEVICE = """\
[device]
n_unit_cells = 24
resonator_enabled = false
n_corners = 0

[pump]
f_p_hz = 7.5e9
p_dbm = -64.0

[signal_band]
f_start_hz = 6.8e9
f_stop_hz = 7.3e9
f_step_hz = 50.0e6
"""


def write_config(tmp_path, text=SMALL_DEVICE, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestConfigValidation:
    def test_unknown_section_key_named_with_path(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "[signal_band]\nf_startz_hz = 4e9\n")
        assert main(["linear", "--config", str(cfg)]) == 2
        err = capsys.readouterr().err
        assert "signal_band.f_startz_hz" in err
        assert "unknown key" in err

    def test_unknown_top_level_key_rejected(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "[bandit]\nx = 1\n")
        assert main(["linear", "--config", str(cfg)]) == 2
        assert "bandit" in capsys.readouterr().err

    def test_wrong_type_named_with_path(self, tmp_path, capsys):
        cfg = write_config(tmp_path, '[device]\ni_c_a = "lots"\n')
        assert main(["linear", "--config", str(cfg)]) == 2
        assert "device.i_c_a" in capsys.readouterr().err

    def test_bool_key_rejects_integer(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "[device]\nresonator_enabled = 1\n")
        assert main(["linear", "--config", str(cfg)]) == 2
        assert "resonator_enabled" in capsys.readouterr().err

    def test_band_must_be_ordered(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path, "[signal_band]\nf_start_hz = 9e9\nf_stop_hz = 5e9\n"
        )
        assert main(["linear", "--config", str(cfg)]) == 2
        assert "f_start" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        missing = tmp_path / "nope.toml"
        assert main(["linear", "--config", str(missing)]) == 2

    def test_override_path_must_exist(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            SMALL_DEVICE
            + '\n[[overrides]]\nsupercell = 0\npath = "missing.s2p"\n',
        )
        assert main(["linear", "--config", str(cfg)]) == 2
        assert "overrides" in capsys.readouterr().err

    def test_override_supercell_out_of_range(self, tmp_path, capsys):
        block = tmp_path / "block.s2p"
        block.write_text("# HZ S RI R 50\n7e9 0 0 1 0 1 0 0 0\n")
        cfg = write_config(
            tmp_path,
            SMALL_DEVICE + f'\n[[overrides]]\nsupercell = 99\npath = "block.s2p"\n',
        )
        assert main(["linear", "--config", str(cfg)]) == 2
        assert "supercell" in capsys.readouterr().err

    def test_overrides_rejected_for_gain_runs(self, tmp_path, capsys):
        spec = default_spec()
        grid = FrequencyGrid(np.arange(6.8e9, 7.3001e9, 50e6))
        net = abcd_to_s(build_supercell(spec, grid), z_ref=50.0)
        doc = TouchstoneDocument(
            unit="hz", fmt="ri", resistance=50.0, comments=(), data=net
        )
        (tmp_path / "block.s2p").write_text(write_touchstone(doc))
        cfg = write_config(
            tmp_path,
            SMALL_DEVICE + '\n[[overrides]]\nsupercell = 1\npath = "block.s2p"\n',
        )
        assert main(["gain", "--config", str(cfg)]) == 2
        assert "override" in capsys.readouterr().err.lower()


class TestLinearCommand:
    def test_writes_csv_and_manifest(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["linear", "--config", str(cfg), "--out", str(out)]) == 0
        csv = (out / "linear_s21.csv").read_text().splitlines()
        assert csv[0] == "freq_hz,s21_re,s21_im,s21_db,s11_db"
        assert len(csv) == 1 + 11  # 6.8..7.3 GHz in 50 MHz steps
        manifest = (out / "run_manifest.txt").read_text()
        assert "device.n_unit_cells = 24" in manifest
        assert "(default)" in manifest
        assert "s21_dip_hz" in manifest

    def test_single_cell_line_is_flat(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "[device]\nn_unit_cells = 1\nresonator_enabled = false\nn_corners = 0\n"
            "[signal_band]\nf_start_hz = 1e9\nf_stop_hz = 10.9e9\nf_step_hz = 100e6\n",
        )
        out = tmp_path / "out"
        assert main(["linear", "--config", str(cfg), "--out", str(out)]) == 0
        rows = np.loadtxt(
            out / "linear_s21.csv", delimiter=",", skiprows=1
        )
        assert np.abs(rows[:, 3]).max() < 0.1

    def test_identical_runs_are_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["linear", "--config", str(cfg), "--out", str(out_a)]) == 0
        assert main(["linear", "--config", str(cfg), "--out", str(out_b)]) == 0
        assert (out_a / "linear_s21.csv").read_bytes() == (
            out_b / "linear_s21.csv"
        ).read_bytes()

    def test_data_files_carry_no_timestamp(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        main(["linear", "--config", str(cfg), "--out", str(out)])
        text = (out / "linear_s21.csv").read_text()
        assert "20" not in text.splitlines()[0]  # header only names columns
        manifest = (out / "run_manifest.txt").read_text()
        assert "generated:" in manifest


class TestGainCommand:
    def test_writes_gain_csv_and_pump_report(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["gain", "--config", str(cfg), "--out", str(out)]) == 0
        csv = (out / "gain.csv").read_text().splitlines()
        assert csv[0] == "freq_hz,gain_db,s21_re,s21_im,idler_db"
        report = (out / "pump_report.txt").read_text()
        assert "pump_iterations" in report
        assert "pump_residual" in report

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["gain", "--config", str(cfg), "--out", str(out_a)]) == 0
        assert main(["gain", "--config", str(cfg), "--out", str(out_b)]) == 0
        assert (out_a / "gain.csv").read_bytes() == (out_b / "gain.csv").read_bytes()

    def test_overdriven_pump_exits_with_solver_code(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SMALL_DEVICE.replace("-64.0", "-20.0"))
        out = tmp_path / "out"
        assert main(["gain", "--config", str(cfg), "--out", str(out)]) == 3
        assert "solver error" in capsys.readouterr().err


class TestSweepCommand:
    def test_summary_and_per_point_files(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        code = main(
            [
                "sweep",
                "--config",
                str(cfg),
                "--out",
                str(out),
                "--df-list=0,20e6",
                "--dp-list=-1,0",
            ]
        )
        assert code == 0
        summary = (out / "sweep_summary.csv").read_text().splitlines()
        assert summary[0] == "df_hz,dp_db,band_avg_gain_db,dip_freq_hz,status"
        assert len(summary) == 5
        assert all((out / f"gain_p{i:03d}.csv").exists() for i in range(4))

    def test_partial_failure_still_succeeds(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        code = main(
            [
                "sweep",
                "--config",
                str(cfg),
                "--out",
                str(out),
                "--df-list=0",
                "--dp-list=0,40",
            ]
        )
        assert code == 0
        summary = (out / "sweep_summary.csv").read_text()
        assert ",ok" in summary
        assert ",failed" in summary

    def test_total_failure_exits_with_solver_code(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        code = main(
            [
                "sweep",
                "--config",
                str(cfg),
                "--out",
                str(out),
                "--df-list=0",
                "--dp-list=40,44",
            ]
        )
        assert code == 3


class TestTouchstoneCommands:
    @pytest.fixture()
    def sample(self, tmp_path, rng):
        spec = default_spec()
        grid = FrequencyGrid(np.linspace(6e9, 8e9, 9))
        net = abcd_to_s(build_supercell(spec, grid), z_ref=50.0)
        doc = TouchstoneDocument(
            unit="hz", fmt="ri", resistance=50.0, comments=("block",), data=net
        )
        path = tmp_path / "block.s2p"
        path.write_text(write_touchstone(doc, precision=12))
        return path

    def test_info_reports_shape(self, sample, capsys):
        assert main(["touchstone", "info", str(sample)]) == 0
        out = capsys.readouterr().out
        assert "2 ports" in out
        assert "9 points" in out
        assert "RI" in out

    def test_convert_rewrites_format(self, sample, tmp_path, capsys):
        dst = tmp_path / "block_db.s2p"
        code = main(
            ["touchstone", "convert", str(sample), str(dst), "--format", "db"]
        )
        assert code == 0
        assert "# HZ S DB R 50" in dst.read_text()

    def test_roundtrip_reports_small_error(self, sample, capsys):
        assert main(["touchstone", "roundtrip", str(sample)]) == 0
        out = capsys.readouterr().out
        err = float(out.split("max relative error:")[1].split()[0])
        assert err < 1e-10

    def test_missing_file_is_io_error(self, tmp_path, capsys):
        missing = tmp_path / "none.s2p"
        assert main(["touchstone", "info", str(missing)]) == 2

    def test_malformed_file_is_parse_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.s2p"
        bad.write_text("# GHZ S RI R 50\n1.0 what 0.0\n")
        assert main(["touchstone", "info", str(bad)]) == 4
        assert "line 2" in capsys.readouterr().err
