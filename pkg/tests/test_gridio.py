import numpy as np
import pytest

from fswsim.flow import TracerPath
from fswsim.gridio import (
    read_csv_columns,
    read_structured_grid_ascii,
    read_trace_csv,
    write_csv,
    write_polylines_csv,
    write_structured_grid_ascii,
    write_trace_csv,
)
from fswsim.solver import EnergyLedger
from fswsim.gridio import write_ledger_csv


class TestStructuredGridAscii:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        values = rng.uniform(290.0, 900.0, size=(8, 5, 3))
        path = tmp_path / "field.vtk"
        write_structured_grid_ascii(path, values, (2e-3, 2e-3, 1e-3), (0.0, 0.0, 0.0))
        back, spacing, origin, name = read_structured_grid_ascii(path)
        assert name == "temperature"
        assert spacing == pytest.approx((2e-3, 2e-3, 1e-3))
        assert origin == pytest.approx((0.0, 0.0, 0.0))
        # %.10g survives the trip at the 1e-7 relative level for these values
        assert np.abs(back - values).max() < 1e-6

    def test_header_layout(self, tmp_path):
        path = tmp_path / "field.vtk"
        write_structured_grid_ascii(
            path, np.full((4, 3, 2), 300.0), (1e-3, 2e-3, 3e-3), title="t = 1 s"
        )
        lines = path.read_text().splitlines()
        assert lines[0] == "# vtk DataFile Version 3.0"
        assert lines[1] == "t = 1 s"
        assert lines[2] == "ASCII"
        assert lines[3] == "DATASET STRUCTURED_POINTS"
        assert lines[4] == "DIMENSIONS 4 3 2"
        assert lines[5] == "ORIGIN 0 0 0"
        assert lines[6] == "SPACING 0.001 0.002 0.003"
        assert lines[7] == "POINT_DATA 24"
        assert lines[8] == "SCALARS temperature float 1"
        assert lines[9] == "LOOKUP_TABLE default"
        assert len(lines) == 10 + 24

    def test_x_varies_fastest(self, tmp_path):
        values = np.arange(24.0).reshape(4, 3, 2)  # value = 6i + 2j + k
        path = tmp_path / "field.vtk"
        write_structured_grid_ascii(path, values, (1.0, 1.0, 1.0))
        data_lines = path.read_text().splitlines()[10:]
        # first four rows walk the x index at j = k = 0
        assert [float(v) for v in data_lines[:4]] == [0.0, 6.0, 12.0, 18.0]

    def test_rejects_non_3d(self, tmp_path):
        with pytest.raises(ValueError):
            write_structured_grid_ascii(tmp_path / "x.vtk", np.zeros((3, 3)), (1, 1, 1))

    def test_reader_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "bogus.vtk"
        path.write_text("hello\nworld\n")
        with pytest.raises(ValueError):
            read_structured_grid_ascii(path)


class TestCsv:
    def test_columns_round_trip(self, tmp_path):
        path = tmp_path / "data.csv"
        write_csv(path, ["a", "b"], [[1.0, 2.5], [3.0, -4.25]])
        back = read_csv_columns(path)
        assert back["a"] == pytest.approx([1.0, 3.0])
        assert back["b"] == pytest.approx([2.5, -4.25])

    def test_trace_round_trip(self, tmp_path):
        times = np.linspace(0.0, 1.0, 11)
        traces = {"tc1": np.linspace(300.0, 400.0, 11), "tc2": np.full(11, 298.0)}
        path = tmp_path / "traces.csv"
        write_trace_csv(path, times, traces)
        header = path.read_text().splitlines()[0]
        assert header == "time_s,tc1_K,tc2_K"
        back_times, back_traces = read_trace_csv(path)
        assert back_times == pytest.approx(times)
        assert set(back_traces) == {"tc1", "tc2"}
        assert back_traces["tc1"] == pytest.approx(traces["tc1"])

    def test_polylines_format(self, tmp_path):
        paths = [
            TracerPath(0, np.array([[0.0, 0.0, 0.0], [1e-3, 2e-3, 0.0]]), "completed"),
            TracerPath(1, np.array([[5e-3, 0.0, 0.0]]), "seed_rejected"),
        ]
        out = tmp_path / "lines.csv"
        write_polylines_csv(out, paths)
        lines = out.read_text().splitlines()
        assert lines[0] == "tracer_id,step,x,y,z"
        assert lines[1] == "0,0,0,0,0"
        assert lines[2] == "0,1,0.001,0.002,0"
        assert lines[3] == "1,0,0.005,0,0"

    def test_ledger_csv(self, tmp_path):
        ledger = EnergyLedger("1:dwell", input_j=100.0, stored_j=80.0,
                              top_convection_j=12.0, top_radiation_j=5.0,
                              side_j=2.0, bottom_j=1.0)
        out = tmp_path / "ledger.csv"
        write_ledger_csv(out, [ledger])
        back = read_csv_columns(out)  # numeric columns only
        assert back["input_J"] == pytest.approx([100.0])
        assert back["closure_rel"][0] == pytest.approx(0.0)

    def test_ragged_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1.0\n")
        with pytest.raises(ValueError, match="ragged"):
            read_csv_columns(path)
