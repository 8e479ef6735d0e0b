import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from fswsim.cli import main
from fswsim.gridio import read_csv_columns, read_structured_grid_ascii, read_trace_csv

EXAMPLE_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "example_weld.cfg"

TINY = """
[tool]
shoulder_radius = 9 mm
probe_radius = 3 mm
probe_height = 4 mm
cone_angle = 10 deg

[process]
omega = 400 rpm
traverse_speed = 400 mm/min
downward_force = 8 kN
torque = 40 N.m
traverse_force = 2 kN
slip_factor = 0.65
friction = 0.3

[workpiece]
length = 80 mm
width = 40 mm
thickness = 6 mm

[material]
density = 2700 kg/m3
emissivity = 0.3
conductivity = 293:167 673:189 W/mK
specific_heat = 293:896 673:1052 J/kgK
yield_strength = 293:276 573:110 855:3 MPa

[solver]
dx = 4 mm
dy = 4 mm
dz = 3 mm
h_top = 12 W/m2K
bottom = gap 1000 W/m2K
tool_start_x = 20 mm

[schedule]
phase1 = plunge 0.5 s
phase2 = dwell 0.5 s
phase3 = traverse 1 s

[probes]
tc1 = 40 mm, 14 mm, 3 mm
tc2 = 50 mm, 20 mm, 5 mm

[flow]
duration = 0.2 s
dt = 2 ms

[output]
directory = out
snapshot_every = 25
"""


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY)
    return path


class TestExitCodes:
    def test_missing_config_is_usage_error(self, capsys):
        assert main(["simulate"]) == 1
        err = capsys.readouterr().err
        assert "usage" in err.lower()

    def test_no_subcommand_is_usage_error(self, capsys):
        assert main([]) == 1
        assert "usage" in capsys.readouterr().err.lower()

    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert main(["transmogrify", "--config", "x"]) == 1

    def test_unreadable_config_is_config_error(self, capsys, tmp_path):
        assert main(["heatgen", "--config", str(tmp_path / "nope.cfg")]) == 2
        assert "cannot read" in capsys.readouterr().err

    def test_invalid_config_is_config_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("[tool]\nshoulder_radius = 9\n")
        assert main(["heatgen", "--config", str(bad)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_simulation_failure_is_runtime_error(self, capsys, tmp_path):
        cfg = tmp_path / "bad_run.cfg"
        cfg.write_text(TINY.replace("tool_start_x = 20 mm", "tool_start_x = 5 mm"))
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3
        assert "footprint" in capsys.readouterr().err

    def test_calibrate_without_section_is_config_error(self, tiny_config, tmp_path, capsys):
        assert main([
            "calibrate", "--config", str(tiny_config), "--out", str(tmp_path / "o"),
        ]) == 2
        assert "calibration" in capsys.readouterr().err

    def test_installed_entry_point(self, tmp_path):
        exe = shutil.which("fswsim")
        if exe is None:
            pytest.skip("console script not on PATH")
        proc = subprocess.run(
            [exe, "simulate"], capture_output=True, text=True, cwd=tmp_path
        )
        assert proc.returncode == 1
        assert "usage" in proc.stderr.lower()
        assert proc.stdout == ""


class TestHeatgen:
    def test_breakdown_table_and_files(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "hg"
        assert main(["heatgen", "--config", str(tiny_config), "--out", str(out)]) == 0
        stdout = capsys.readouterr().out
        table = {}
        for line in stdout.splitlines():
            name, value = line.split(None, 1)
            table[name] = float(value)
        assert table["f_shoulder"] == pytest.approx(0.86, abs=0.005)
        assert table["f_probe_side"] == pytest.approx(0.11, abs=0.005)
        assert table["f_probe_tip"] == pytest.approx(0.03, abs=0.005)
        assert table["traverse_share"] < 0.01
        assert (out / "heatgen_breakdown.csv").exists()
        assert (out / "heatgen_breakdown.png").exists()
        csv = read_csv_columns(out / "heatgen_breakdown.csv")
        assert "quantity" in csv and "value" in csv


class TestSimulate:
    def test_outputs(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "sim"
        assert main(["simulate", "--config", str(tiny_config), "--out", str(out)]) == 0
        times, traces = read_trace_csv(out / "probe_traces.csv")
        assert set(traces) == {"tc1", "tc2"}
        assert np.all(np.diff(times) > 0.0)  # strictly increasing time column
        values, spacing, origin, name = read_structured_grid_ascii(
            out / "peak_temperature.vtk"
        )
        assert name == "temperature"
        assert values.shape == (20, 10, 2)
        assert values.max() > 350.0
        ledger = read_csv_columns(out / "energy_ledger.csv")
        assert list(ledger["phase"]) == ["1:plunge", "2:dwell", "3:traverse", "total"]
        assert ledger["closure_rel"].max() < 1e-3
        snapshots = sorted(out.glob("snapshot_*.vtk"))
        assert snapshots
        read_structured_grid_ascii(snapshots[0])
        assert (out / "probe_traces.png").exists()
        assert (out / "peak_temperature.png").exists()

    def test_shipped_example_completes(self, tmp_path):
        out = tmp_path / "example"
        assert main([
            "simulate", "--config", str(EXAMPLE_CONFIG), "--out", str(out), "--no-plots",
        ]) == 0
        times, traces = read_trace_csv(out / "probe_traces.csv")
        assert np.all(np.diff(times) > 0.0)
        assert set(traces) == {"tc_advancing", "tc_retreating", "tc_weldline"}
        assert sorted(out.glob("snapshot_*.vtk"))

    def test_no_plots_flag(self, tiny_config, tmp_path):
        out = tmp_path / "noplot"
        assert main([
            "simulate", "--config", str(tiny_config), "--out", str(out), "--no-plots",
        ]) == 0
        assert not list(out.glob("*.png"))
        assert (out / "probe_traces.csv").exists()

    def test_byte_identical_reruns(self, tiny_config, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert main([
                "simulate", "--config", str(tiny_config), "--out", str(out),
                "--seed", "7", "--no-plots",
            ]) == 0
        for name in ("probe_traces.csv", "energy_ledger.csv", "peak_temperature.vtk"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestFlow:
    def test_outputs(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "flow"
        assert main(["flow", "--config", str(tiny_config), "--out", str(out)]) == 0
        csv = read_csv_columns(out / "streamlines.csv")
        assert set(csv) == {"tracer_id", "step", "x", "y", "z"}
        assert np.unique(csv["tracer_id"]).size == 12
        assert (out / "streamlines.png").exists()
        stdout = capsys.readouterr().out
        assert "tracer 0:" in stdout


class TestCalibrate:
    def test_round_trip_smoke(self, tmp_path, capsys):
        out = tmp_path / "cal"
        config_path = tmp_path / "cal.cfg"
        config_path.write_text(
            TINY
            + "\n[calibration]\ntargets = "
            + str(tmp_path / "targets.csv")
            + "\nfree = slip_factor\nmax_evaluations = 25\nconfirm = false\n"
        )
        # synthesize targets by running the forward model at the config's slip factor
        from fswsim.cli import _build_model
        from fswsim.config import parse_config
        from fswsim.gridio import write_trace_csv

        cfg = parse_config(config_path.read_text())
        history = _build_model(cfg).run()
        write_trace_csv(tmp_path / "targets.csv", history.times, history.probe_traces)

        assert main(["calibrate", "--config", str(config_path), "--out", str(out)]) == 0
        report = (out / "calibration_report.txt").read_text()
        assert "slip_factor" in report
        fitted = float(report.split("slip_factor")[1].split()[0])
        assert 0.0 <= fitted <= 1.0
        assert abs(fitted - 0.65) < 0.05  # truth is the config's slip factor
        convergence = read_csv_columns(out / "calibration_convergence.csv")
        assert convergence["best_objective"][-1] <= convergence["best_objective"][0]
        assert (out / "calibration_convergence.png").exists()
