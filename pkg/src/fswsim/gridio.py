"""Result serialization: legacy structured-grid ASCII snapshots and CSV files.

Snapshot layout (one value per line, x varying fastest, then y, then z):

    # vtk DataFile Version 3.0
    <title>
    ASCII
    DATASET STRUCTURED_POINTS
    DIMENSIONS nx ny nz
    ORIGIN x0 y0 z0
    SPACING dx dy dz
    POINT_DATA n
    SCALARS temperature float 1
    LOOKUP_TABLE default

CSV files use '.' decimals, LF line endings and a fixed column order; floats
are written with %.10g, so identical runs produce byte-identical output.
Everything written here can be read back by the readers below.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

FLOAT_FORMAT = "%.10g"


def _fmt(value: float) -> str:
    return FLOAT_FORMAT % value


def write_structured_grid_ascii(
    path,
    values: np.ndarray,
    spacing: tuple[float, float, float],
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0),
    name: str = "temperature",
    title: str = "fswsim snapshot",
) -> None:
    """Write a 3D scalar field as a legacy structured-points ASCII file."""
    values = np.asarray(values)
    if values.ndim != 3:
        raise ValueError(f"expected a 3D array, got shape {values.shape}")
    nx, ny, nz = values.shape
    with open(path, "w", newline="\n") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"{title}\n")
        fh.write("ASCII\n")
        fh.write("DATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {nx} {ny} {nz}\n")
        fh.write("ORIGIN " + " ".join(_fmt(v) for v in origin) + "\n")
        fh.write("SPACING " + " ".join(_fmt(v) for v in spacing) + "\n")
        fh.write(f"POINT_DATA {nx * ny * nz}\n")
        fh.write(f"SCALARS {name} float 1\n")
        fh.write("LOOKUP_TABLE default\n")
        flat = values.reshape((nx, ny, nz)).transpose(2, 1, 0).ravel()  # x fastest
        for v in flat:
            fh.write(_fmt(v) + "\n")


def read_structured_grid_ascii(path):
    """Read a snapshot written by :func:`write_structured_grid_ascii`.

    Returns ``(values, spacing, origin, name)`` with values shaped (nx, ny, nz).
    """
    lines = Path(path).read_text().splitlines()
    if len(lines) < 10 or not lines[0].startswith("# vtk DataFile"):
        raise ValueError(f"{path}: not a legacy structured-grid ASCII file")
    header = {}
    data_start = None
    name = "unknown"
    for i, line in enumerate(lines):
        if line.startswith("DIMENSIONS"):
            header["dims"] = tuple(int(t) for t in line.split()[1:4])
        elif line.startswith("ORIGIN"):
            header["origin"] = tuple(float(t) for t in line.split()[1:4])
        elif line.startswith("SPACING"):
            header["spacing"] = tuple(float(t) for t in line.split()[1:4])
        elif line.startswith("SCALARS"):
            name = line.split()[1]
        elif line.startswith("LOOKUP_TABLE"):
            data_start = i + 1
            break
    if data_start is None or "dims" not in header:
        raise ValueError(f"{path}: missing structured-grid header fields")
    nx, ny, nz = header["dims"]
    flat = np.array([float(v) for v in lines[data_start : data_start + nx * ny * nz]])
    if flat.size != nx * ny * nz:
        raise ValueError(f"{path}: expected {nx * ny * nz} values, found {flat.size}")
    values = flat.reshape((nz, ny, nx)).transpose(2, 1, 0)
    return values, header["spacing"], header["origin"], name


def write_csv(path, columns: list[str], rows) -> None:
    """Fixed-order delimited output; floats via %.10g, other cells via str()."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            cells = [
                _fmt(cell) if isinstance(cell, (float, np.floating)) else str(cell)
                for cell in row
            ]
            fh.write(",".join(cells) + "\n")


def read_csv_columns(path) -> dict[str, np.ndarray]:
    """Read a CSV written by :func:`write_csv` into named columns.

    Columns are numeric arrays where every cell parses as a float, and
    string arrays otherwise (e.g. the energy ledger's phase labels).
    """
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    names = lines[0].split(",")
    data: list[list[str]] = [[] for _ in names]
    for line in lines[1:]:
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(names):
            raise ValueError(f"{path}: ragged row {line!r}")
        for store, cell in zip(data, cells):
            store.append(cell)
    columns = {}
    for name, cells in zip(names, data):
        try:
            columns[name] = np.asarray([float(c) for c in cells])
        except ValueError:
            columns[name] = np.asarray(cells)
    return columns


def write_trace_csv(path, times: np.ndarray, traces: dict[str, np.ndarray]) -> None:
    columns = ["time_s"] + [f"{name}_K" for name in traces]
    rows = zip(times, *traces.values())
    write_csv(path, columns, ([float(t), *map(float, rest)] for t, *rest in rows))


def read_trace_csv(path) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Trace CSV back as (times, {probe_name: temperatures})."""
    columns = read_csv_columns(path)
    if "time_s" not in columns:
        raise ValueError(f"{path}: trace CSV must have a time_s column")
    times = columns.pop("time_s")
    traces = {
        (name[: -2] if name.endswith("_K") else name): values
        for name, values in columns.items()
    }
    return times, traces


def write_polylines_csv(path, paths) -> None:
    """Tracer polylines as tracer_id,step,x,y,z rows."""
    rows = []
    for tp in paths:
        for step, (x, y, z) in enumerate(tp.points):
            rows.append([tp.tracer_id, step, float(x), float(y), float(z)])
    write_csv(path, ["tracer_id", "step", "x", "y", "z"], rows)


def write_ledger_csv(path, ledgers) -> None:
    """Per-phase plus total energy ledger rows."""
    columns = [
        "phase", "input_J", "stored_J", "top_convection_J", "top_radiation_J",
        "side_J", "bottom_J", "closure_rel",
    ]
    rows = [
        [
            led.label, led.input_j, led.stored_j, led.top_convection_j,
            led.top_radiation_j, led.side_j, led.bottom_j, led.closure_rel,
        ]
        for led in ledgers
    ]
    write_csv(path, columns, rows)
