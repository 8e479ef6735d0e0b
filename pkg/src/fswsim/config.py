"""Sectioned key-value run configuration: parsing, validation, serialization.

Grammar: ``[section]`` headers, ``key = value`` lines, ``#`` comments. Every
dimensioned value carries an explicit unit suffix (``9 mm``, ``400 rpm``,
``8 kN``); bare numbers are only accepted for dimensionless keys. Property
tables are ``T:value`` pairs (temperatures in kelvin) followed by a single
value unit, e.g. ``conductivity = 293:167 673:189 W/mK``. Unknown sections
or keys and missing units are hard errors with the offending line number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import replace as dc_replace

from .calibrate import DEFAULT_BOUNDS, ParameterSpec
from .core import (
    Adiabatic,
    BottomContact,
    ContactModel,
    GapConductance,
    PerfectContact,
    ProcessParameters,
    SparContact,
    ToolGeometry,
    WeldPhase,
    WeldSchedule,
    WorkpieceGeometry,
    shoulder_contact_pressure,
)
from .flow import FlowField
from .materials import JohnsonCookParams, SellarsTegartParams, ThermophysicalTable
from .solver import SolverSettings


class ConfigError(ValueError):
    """Configuration text failed to parse or validate."""


_UNITS: dict[str, dict[str, float]] = {
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
    "angular_speed": {"rad/s": 1.0, "rpm": 2.0 * math.pi / 60.0},
    "speed": {"m/s": 1.0, "mm/s": 1e-3, "mm/min": 1e-3 / 60.0},
    "force": {"N": 1.0, "kN": 1e3},
    "pressure": {"Pa": 1.0, "MPa": 1e6, "GPa": 1e9},
    "htc": {"W/m2K": 1.0},
    "conductivity": {"W/mK": 1.0},
    "specific_heat": {"J/kgK": 1.0},
    "density": {"kg/m3": 1.0},
    "torque": {"N.m": 1.0, "Nm": 1.0},
    "time": {"s": 1.0, "ms": 1e-3, "min": 60.0},
    "circulation": {"m2/s": 1.0, "mm2/s": 1e-6},
    "strain_rate": {"1/s": 1.0},
    "molar_energy": {"J/mol": 1.0, "kJ/mol": 1e3},
    "inverse_pressure": {"1/Pa": 1.0, "1/MPa": 1e-6},
}


@dataclass(frozen=True)
class _Raw:
    value: str
    line: int


class _Section:
    """One parsed section with strict key accounting."""

    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.entries: dict[str, _Raw] = {}
        self.consumed: set[str] = set()

    def take(self, key: str) -> _Raw | None:
        self.consumed.add(key)
        return self.entries.get(key)

    def require(self, key: str) -> _Raw:
        raw = self.take(key)
        if raw is None:
            raise ConfigError(f"[{self.name}] is missing the required key {key!r}")
        return raw

    def unknown_keys(self) -> list[tuple[str, int]]:
        return [
            (k, raw.line) for k, raw in self.entries.items() if k not in self.consumed
        ]


def _tokenize(text: str) -> dict[str, _Section]:
    sections: dict[str, _Section] = {}
    current: _Section | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header {stripped!r}")
            name = stripped[1:-1].strip()
            if not name:
                raise ConfigError(f"line {lineno}: empty section name")
            if name in sections:
                raise ConfigError(f"line {lineno}: duplicate section [{name}]")
            current = _Section(name, lineno)
            sections[name] = current
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in current.entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in [{current.name}]")
        current.entries[key] = _Raw(value, lineno)
    return sections


def _number(token: str, raw: _Raw, key: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ConfigError(
            f"line {raw.line}: {key} = {raw.value!r} is not a number"
        ) from None


def _quantity(raw: _Raw, key: str, kind: str) -> float:
    """Parse 'NUMBER UNIT' with the explicit unit suffix required."""
    tokens = raw.value.split()
    if kind == "temperature":
        if len(tokens) != 2 or tokens[1] not in ("K", "C"):
            raise ConfigError(
                f"line {raw.line}: {key} needs an explicit temperature unit (K or C), "
                f"got {raw.value!r}"
            )
        value = _number(tokens[0], raw, key)
        return value if tokens[1] == "K" else value + 273.15
    units = _UNITS[kind]
    if len(tokens) != 2:
        raise ConfigError(
            f"line {raw.line}: {key} needs '<number> <unit>' with unit in "
            f"{sorted(units)}, got {raw.value!r}"
        )
    if tokens[1] not in units:
        raise ConfigError(
            f"line {raw.line}: unknown {kind} unit {tokens[1]!r} for {key} "
            f"(accepted: {sorted(units)})"
        )
    return _number(tokens[0], raw, key) * units[tokens[1]]


def _bare_number(raw: _Raw, key: str) -> float:
    tokens = raw.value.split()
    if len(tokens) != 1:
        raise ConfigError(
            f"line {raw.line}: {key} is dimensionless and takes a bare number, "
            f"got {raw.value!r}"
        )
    return _number(tokens[0], raw, key)


def _integer(raw: _Raw, key: str) -> int:
    value = _bare_number(raw, key)
    if value != int(value):
        raise ConfigError(f"line {raw.line}: {key} must be an integer, got {raw.value!r}")
    return int(value)


def _choice(raw: _Raw, key: str, options: tuple[str, ...]) -> str:
    value = raw.value.strip().lower()
    if value not in options:
        raise ConfigError(
            f"line {raw.line}: {key} must be one of {options}, got {raw.value!r}"
        )
    return value


def _table(raw: _Raw, key: str, value_kind: str) -> tuple[tuple[float, float], ...]:
    """Parse 'T:value T:value ... UNIT' (temperatures in kelvin)."""
    tokens = raw.value.split()
    if len(tokens) < 3:
        raise ConfigError(
            f"line {raw.line}: {key} needs at least two 'T:value' pairs and a unit"
        )
    unit = tokens[-1]
    units = _UNITS[value_kind]
    if unit not in units:
        raise ConfigError(
            f"line {raw.line}: {key} table ends with unknown unit {unit!r} "
            f"(accepted: {sorted(units)})"
        )
    factor = units[unit]
    pairs = []
    for token in tokens[:-1]:
        if ":" not in token:
            raise ConfigError(
                f"line {raw.line}: {key} expects 'T:value' pairs, got {token!r}"
            )
        t_text, v_text = token.split(":", 1)
        pairs.append((_number(t_text, raw, key), _number(v_text, raw, key) * factor))
    return tuple(pairs)


def _bottom_condition(raw: _Raw, key: str) -> BottomContact:
    tokens = raw.value.split()
    kind = tokens[0].lower()
    try:
        if kind == "adiabatic" and len(tokens) == 1:
            return Adiabatic()
        if kind == "perfect" and len(tokens) == 1:
            return PerfectContact()
        if kind == "spar" and len(tokens) == 5:
            width = _quantity(_Raw(" ".join(tokens[1:3]), raw.line), key, "length")
            height = _quantity(_Raw(" ".join(tokens[3:5]), raw.line), key, "length")
            return SparContact(width, height)
        if kind == "gap" and len(tokens) == 3:
            h = _quantity(_Raw(" ".join(tokens[1:3]), raw.line), key, "htc")
            return GapConductance(h)
    except ValueError as exc:
        raise ConfigError(f"line {raw.line}: invalid bottom condition: {exc}") from exc
    raise ConfigError(
        f"line {raw.line}: bottom must be 'adiabatic', 'perfect', "
        f"'spar <w> <unit> <h> <unit>' or 'gap <h> <unit>', got {raw.value!r}"
    )


@dataclass(frozen=True)
class FlowSection:
    """Resolved tracer-flow settings for the flow subcommand."""

    field: FlowField
    tracer_count: int
    tracer_radius: float
    seed_depth: float
    duration: float
    dt: float
    max_distance: float | None


@dataclass(frozen=True)
class CalibrationSection:
    """Resolved inverse-calibration settings for the calibrate subcommand."""

    targets_path: str
    parameters: tuple[ParameterSpec, ...]
    max_evaluations: int
    tolerance: float
    coarse_spacing: tuple[float, float, float] | None
    weights: dict[str, float]
    confirm: bool


@dataclass(frozen=True)
class RunConfig:
    """Fully validated simulation setup assembled from a config file."""

    tool: ToolGeometry
    process: ProcessParameters
    contact: ContactModel
    workpiece: WorkpieceGeometry
    material: ThermophysicalTable
    settings: SolverSettings
    schedule: WeldSchedule
    spacing: tuple[float, float, float]
    probes: dict[str, tuple[float, float, float]]
    heat_model: str
    yield_model: str
    contact_reference_temperature: float
    tool_start_x: float
    jc_params: JohnsonCookParams | None
    jc_strain: float
    jc_strain_rate: float | None
    st_params: SellarsTegartParams | None
    flow: FlowSection
    calibration: CalibrationSection | None
    output_dir: str
    snapshot_every: int


def _wrap(section: str, key: str, raw: _Raw | None):
    """Context manager-free error wrapper: re-raise ValueError as ConfigError."""

    class _Ctx:
        def __enter__(self):
            return None

        def __exit__(self, exc_type, exc, tb):
            if exc_type is not None and issubclass(exc_type, ValueError) and not issubclass(
                exc_type, ConfigError
            ):
                line = f"line {raw.line}: " if raw is not None else ""
                raise ConfigError(f"{line}[{section}] {key}: {exc}") from exc
            return False

    return _Ctx()


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration; every violation names its line."""
    sections = _tokenize(text)
    known = {
        "tool", "process", "workpiece", "material", "solver", "schedule",
        "probes", "output", "flow", "calibration", "johnson_cook", "sellars_tegart",
    }
    for name, section in sections.items():
        if name not in known:
            raise ConfigError(f"line {section.line}: unknown section [{name}]")
    required = ("tool", "process", "workpiece", "material", "solver", "schedule")
    for name in required:
        if name not in sections:
            raise ConfigError(f"missing required section [{name}]")

    tool_s = sections["tool"]
    with _wrap("tool", "geometry", tool_s.entries.get("shoulder_radius")):
        tool = ToolGeometry(
            shoulder_radius=_quantity(tool_s.require("shoulder_radius"), "shoulder_radius", "length"),
            probe_radius=_quantity(tool_s.require("probe_radius"), "probe_radius", "length"),
            probe_height=_quantity(tool_s.require("probe_height"), "probe_height", "length"),
            cone_angle=(
                _quantity(raw, "cone_angle", "angle")
                if (raw := tool_s.take("cone_angle")) is not None
                else 0.0
            ),
        )

    proc_s = sections["process"]
    with _wrap("process", "parameters", proc_s.entries.get("omega")):
        process = ProcessParameters(
            omega=_quantity(proc_s.require("omega"), "omega", "angular_speed"),
            traverse_speed=_quantity(
                proc_s.require("traverse_speed"), "traverse_speed", "speed"
            ),
            downward_force=_quantity(
                proc_s.require("downward_force"), "downward_force", "force"
            ),
            torque=(
                _quantity(raw, "torque", "torque")
                if (raw := proc_s.take("torque")) is not None
                else None
            ),
            traverse_force=(
                _quantity(raw, "traverse_force", "force")
                if (raw := proc_s.take("traverse_force")) is not None
                else None
            ),
            efficiency=(
                _bare_number(raw, "efficiency")
                if (raw := proc_s.take("efficiency")) is not None
                else 0.95
            ),
            tilt_angle=(
                _quantity(raw, "tilt_angle", "angle")
                if (raw := proc_s.take("tilt_angle")) is not None
                else 0.0
            ),
        )
    slip = _bare_number(proc_s.require("slip_factor"), "slip_factor")
    friction = _bare_number(proc_s.require("friction"), "friction")
    with _wrap("process", "contact", proc_s.entries.get("slip_factor")):
        contact = ContactModel(
            slip_factor=slip,
            friction_coefficient=friction,
            contact_pressure=shoulder_contact_pressure(process.downward_force, tool),
        )
    heat_model = (
        _choice(raw, "heat_model", ("contact", "torque"))
        if (raw := proc_s.take("heat_model")) is not None
        else "contact"
    )
    if heat_model == "torque" and process.torque is None:
        raise ConfigError("[process] heat_model = torque requires a torque value")
    ref_temp_raw = proc_s.take("contact_reference_temperature")

    wp_s = sections["workpiece"]
    with _wrap("workpiece", "geometry", wp_s.entries.get("length")):
        workpiece = WorkpieceGeometry(
            length=_quantity(wp_s.require("length"), "length", "length"),
            width=_quantity(wp_s.require("width"), "width", "length"),
            thickness=_quantity(wp_s.require("thickness"), "thickness", "length"),
            joint_offset=(
                _quantity(raw, "joint_offset", "length")
                if (raw := wp_s.take("joint_offset")) is not None
                else 0.0
            ),
        )
    if workpiece.thickness < tool.probe_height:
        raise ConfigError(
            f"[workpiece] thickness {workpiece.thickness} m is smaller than the "
            f"probe height {tool.probe_height} m"
        )

    mat_s = sections["material"]
    name_raw = mat_s.take("name")
    with _wrap("material", "tables", mat_s.entries.get("density")):
        material = ThermophysicalTable(
            density=_quantity(mat_s.require("density"), "density", "density"),
            emissivity=_bare_number(mat_s.require("emissivity"), "emissivity"),
            conductivity_table=_table(mat_s.require("conductivity"), "conductivity", "conductivity"),
            specific_heat_table=_table(
                mat_s.require("specific_heat"), "specific_heat", "specific_heat"
            ),
            yield_strength_table=_table(
                mat_s.require("yield_strength"), "yield_strength", "pressure"
            ),
            name=name_raw.value if name_raw is not None else "unnamed",
        )
    contact_reference_temperature = (
        _quantity(ref_temp_raw, "contact_reference_temperature", "temperature")
        if ref_temp_raw is not None
        else material.yield_strength_table[-1][0]
    )

    jc_params = None
    jc_strain = 0.0
    jc_strain_rate: float | None = None
    if "johnson_cook" in sections:
        jc_s = sections["johnson_cook"]
        with _wrap("johnson_cook", "parameters", jc_s.entries.get("a")):
            jc_params = JohnsonCookParams(
                a=_quantity(jc_s.require("a"), "a", "pressure"),
                b=_quantity(jc_s.require("b"), "b", "pressure"),
                c=_bare_number(jc_s.require("c"), "c"),
                n=_bare_number(jc_s.require("n"), "n"),
                m=_bare_number(jc_s.require("m"), "m"),
                t_melt=_quantity(jc_s.require("t_melt"), "t_melt", "temperature"),
                t_ref=_quantity(jc_s.require("t_ref"), "t_ref", "temperature"),
                eps_dot_ref=(
                    _quantity(raw, "reference_strain_rate", "strain_rate")
                    if (raw := jc_s.take("reference_strain_rate")) is not None
                    else 1.0
                ),
            )
        jc_strain = (
            _bare_number(raw, "strain") if (raw := jc_s.take("strain")) is not None else 0.0
        )
        if (raw := jc_s.take("strain_rate")) is not None:
            jc_strain_rate = _quantity(raw, "strain_rate", "strain_rate")

    st_params = None
    if "sellars_tegart" in sections:
        st_s = sections["sellars_tegart"]
        with _wrap("sellars_tegart", "parameters", st_s.entries.get("structure_factor")):
            st_params = SellarsTegartParams(
                structure_factor=_quantity(
                    st_s.require("structure_factor"), "structure_factor", "strain_rate"
                ),
                stress_multiplier=_quantity(
                    st_s.require("stress_multiplier"), "stress_multiplier", "inverse_pressure"
                ),
                stress_exponent=_bare_number(st_s.require("stress_exponent"), "stress_exponent"),
                activation_energy=_quantity(
                    st_s.require("activation_energy"), "activation_energy", "molar_energy"
                ),
            )

    sol_s = sections["solver"]
    dx = _quantity(sol_s.require("dx"), "dx", "length")
    dy = _quantity(sol_s.require("dy"), "dy", "length")
    dz = _quantity(sol_s.require("dz"), "dz", "length")
    ambient = (
        _quantity(raw, "ambient", "temperature")
        if (raw := sol_s.take("ambient")) is not None
        else 298.0
    )
    dt_raw = sol_s.take("dt")
    if dt_raw is None or dt_raw.value.strip().lower() == "auto":
        dt_value = None
    else:
        dt_value = _quantity(dt_raw, "dt", "time")
    yield_model = (
        _choice(raw, "yield_model", ("table", "johnson_cook"))
        if (raw := sol_s.take("yield_model")) is not None
        else "table"
    )
    if yield_model == "johnson_cook" and jc_params is None:
        raise ConfigError(
            "[solver] yield_model = johnson_cook requires a [johnson_cook] section"
        )
    with _wrap("solver", "settings", sol_s.entries.get("dx")):
        settings = SolverSettings(
            ambient=ambient,
            h_top=_quantity(sol_s.require("h_top"), "h_top", "htc"),
            h_side=(
                _quantity(raw, "h_side", "htc")
                if (raw := sol_s.take("h_side")) is not None
                else None
            ),
            bottom=_bottom_condition(sol_s.require("bottom"), "bottom"),
            flux_profile=(
                _choice(raw, "flux_profile", ("uniform", "linear_in_r"))
                if (raw := sol_s.take("flux_profile")) is not None
                else "linear_in_r"
            ),
            dt=dt_value,
            source_mode=(
                _choice(raw, "source_mode", ("surface", "surface_plus_volumetric"))
                if (raw := sol_s.take("source_mode")) is not None
                else "surface"
            ),
            volumetric_fraction=(
                _bare_number(raw, "volumetric_fraction")
                if (raw := sol_s.take("volumetric_fraction")) is not None
                else None
            ),
            taylor_quinney=(
                _bare_number(raw, "taylor_quinney")
                if (raw := sol_s.take("taylor_quinney")) is not None
                else 0.9
            ),
            backing_thickness=(
                _quantity(raw, "backing_thickness", "length")
                if (raw := sol_s.take("backing_thickness")) is not None
                else 0.012
            ),
            initial_temperature=(
                _quantity(raw, "initial_temperature", "temperature")
                if (raw := sol_s.take("initial_temperature")) is not None
                else None
            ),
        )
    # resolve the optional settings so a serialize/parse cycle is exact
    settings = dc_replace(
        settings,
        h_side=settings.side_coefficient,
        volumetric_fraction=settings.gamma,
        initial_temperature=settings.start_temperature,
    )
    tool_start_x = (
        _quantity(raw, "tool_start_x", "length")
        if (raw := sol_s.take("tool_start_x")) is not None
        else workpiece.length / 4.0
    )

    sched_s = sections["schedule"]
    plunge_rate = (
        _quantity(raw, "plunge_rate", "speed")
        if (raw := sched_s.take("plunge_rate")) is not None
        else 0.0
    )
    phases = []
    index = 1
    while (raw := sched_s.take(f"phase{index}")) is not None:
        tokens = raw.value.split()
        if len(tokens) != 3:
            raise ConfigError(
                f"line {raw.line}: phase{index} must be '<kind> <duration> <unit>', "
                f"got {raw.value!r}"
            )
        kind = tokens[0].lower()
        duration = _quantity(_Raw(" ".join(tokens[1:]), raw.line), f"phase{index}", "time")
        with _wrap("schedule", f"phase{index}", raw):
            phases.append(
                WeldPhase(
                    kind=kind,
                    duration=duration,
                    omega=process.omega,
                    traverse_speed=process.traverse_speed if kind == "traverse" else 0.0,
                    plunge_rate=plunge_rate if kind == "plunge" else 0.0,
                )
            )
        index += 1
    if not phases:
        raise ConfigError("[schedule] needs at least one 'phase1 = <kind> <duration>' entry")
    with _wrap("schedule", "order", sched_s.entries.get("phase1")):
        schedule = WeldSchedule(tuple(phases))

    probes: dict[str, tuple[float, float, float]] = {}
    if "probes" in sections:
        probe_s = sections["probes"]
        snapped = _snapped_extents(workpiece, (dx, dy, dz))
        for pname, raw in probe_s.entries.items():
            probe_s.consumed.add(pname)
            parts = [p.strip() for p in raw.value.split(",")]
            if len(parts) != 3:
                raise ConfigError(
                    f"line {raw.line}: probe {pname!r} must be 'x, y, z' with units"
                )
            coords = tuple(
                _quantity(_Raw(part, raw.line), pname, "length") for part in parts
            )
            for c, limit, axis in zip(coords, snapped, "xyz"):
                if not 0.0 <= c <= limit:
                    raise ConfigError(
                        f"line {raw.line}: probe {pname!r} {axis}={c} m lies outside "
                        f"the {limit} m domain"
                    )
            probes[pname] = coords

    flow = _parse_flow(sections.get("flow"), tool, process, contact)
    calibration = _parse_calibration(sections.get("calibration"))

    output_dir = "out"
    snapshot_every = 0
    if "output" in sections:
        out_s = sections["output"]
        if (raw := out_s.take("directory")) is not None:
            output_dir = raw.value
        if (raw := out_s.take("snapshot_every")) is not None:
            snapshot_every = _integer(raw, "snapshot_every")
            if snapshot_every < 0:
                raise ConfigError(f"line {raw.line}: snapshot_every must be >= 0")

    for name, section in sections.items():
        for key, line in section.unknown_keys():
            raise ConfigError(f"line {line}: unknown key {key!r} in [{name}]")

    return RunConfig(
        tool=tool,
        process=process,
        contact=contact,
        workpiece=workpiece,
        material=material,
        settings=settings,
        schedule=schedule,
        spacing=(dx, dy, dz),
        probes=probes,
        heat_model=heat_model,
        yield_model=yield_model,
        contact_reference_temperature=contact_reference_temperature,
        tool_start_x=tool_start_x,
        jc_params=jc_params,
        jc_strain=jc_strain,
        jc_strain_rate=jc_strain_rate,
        st_params=st_params,
        flow=flow,
        calibration=calibration,
        output_dir=output_dir,
        snapshot_every=snapshot_every,
    )


def _snapped_extents(
    workpiece: WorkpieceGeometry, spacing: tuple[float, float, float]
) -> tuple[float, float, float]:
    dx, dy, dz = spacing
    return (
        max(2, round(workpiece.length / dx)) * dx,
        max(2, round(workpiece.width / dy)) * dy,
        max(1, round(workpiece.thickness / dz)) * dz,
    )


def _parse_flow(
    section: _Section | None,
    tool: ToolGeometry,
    process: ProcessParameters,
    contact: ContactModel,
) -> FlowSection:
    def take(key, kind, default):
        if section is None:
            return default
        raw = section.take(key)
        if raw is None:
            return default
        if kind == "bare":
            return _bare_number(raw, key)
        if kind == "int":
            return _integer(raw, key)
        return _quantity(raw, key, kind)

    shear = take("shear_zone_radius", "length", 2.0 * tool.probe_radius)
    rotation = take("rotation_rate", "angular_speed", contact.slip_factor * process.omega)
    circulation = take("circulation", "circulation", 0.0)
    core = take("core_radius", "length", 0.25 * (shear - tool.probe_radius) or tool.probe_radius / 4.0)
    ring = take("ring_radius", "length", 0.5 * (tool.probe_radius + shear))
    where = f"line {section.line}: " if section is not None else ""
    try:
        field = FlowField(
            probe_radius=tool.probe_radius,
            shear_zone_radius=shear,
            rotation_rate=rotation,
            traverse_speed=take("traverse_speed", "speed", process.traverse_speed),
            circulation=circulation,
            core_radius=core,
            ring_radius=ring,
        )
    except ValueError as exc:
        raise ConfigError(f"{where}[flow]: {exc}") from exc
    tracer_count = take("tracer_count", "int", 12)
    if tracer_count < 1:
        raise ConfigError(f"{where}[flow] tracer_count must be >= 1")
    duration = take("duration", "time", 2.0)
    dt = take("dt", "time", 1e-3)
    if duration <= 0.0 or dt <= 0.0:
        raise ConfigError(f"{where}[flow] duration and dt must be > 0")
    return FlowSection(
        field=field,
        tracer_count=tracer_count,
        tracer_radius=take("tracer_radius", "length", 0.5 * (tool.probe_radius + shear)),
        seed_depth=take("seed_depth", "length", 0.0),
        duration=duration,
        dt=dt,
        max_distance=take("max_distance", "length", None),
    )


def _parse_calibration(section: _Section | None) -> CalibrationSection | None:
    if section is None:
        return None
    targets = section.require("targets").value
    free_raw = section.require("free")
    names = free_raw.value.split()
    parameters = []
    for name in names:
        if name not in DEFAULT_BOUNDS:
            raise ConfigError(
                f"line {free_raw.line}: unknown calibration parameter {name!r}; "
                f"known: {sorted(DEFAULT_BOUNDS)}"
            )
        lo, hi, log_scale = DEFAULT_BOUNDS[name]
        if (raw := section.take(f"{name}_bounds")) is not None:
            tokens = raw.value.split()
            if name == "h_gap":
                if len(tokens) != 3:
                    raise ConfigError(
                        f"line {raw.line}: {name}_bounds needs '<lo> <hi> <unit>'"
                    )
                unit = tokens[2]
                if unit not in _UNITS["htc"]:
                    raise ConfigError(f"line {raw.line}: unknown unit {unit!r}")
                factor = _UNITS["htc"][unit]
                lo = _number(tokens[0], raw, name) * factor
                hi = _number(tokens[1], raw, name) * factor
            else:
                if len(tokens) != 2:
                    raise ConfigError(f"line {raw.line}: {name}_bounds needs '<lo> <hi>'")
                lo = _number(tokens[0], raw, name)
                hi = _number(tokens[1], raw, name)
        try:
            parameters.append(ParameterSpec(name, lo, hi, log_scale))
        except ValueError as exc:
            raise ConfigError(f"line {free_raw.line}: {exc}") from exc
    if not parameters:
        raise ConfigError(f"line {free_raw.line}: 'free' must name at least one parameter")

    coarse = None
    coarse_keys = [section.take(f"coarse_{axis}") for axis in ("dx", "dy", "dz")]
    if any(raw is not None for raw in coarse_keys):
        if not all(raw is not None for raw in coarse_keys):
            raise ConfigError("[calibration] coarse_dx/coarse_dy/coarse_dz must all be set")
        coarse = tuple(
            _quantity(raw, f"coarse_{axis}", "length")
            for raw, axis in zip(coarse_keys, ("dx", "dy", "dz"))
        )

    weights: dict[str, float] = {}
    if (raw := section.take("weights")) is not None:
        for token in raw.value.split():
            if ":" not in token:
                raise ConfigError(
                    f"line {raw.line}: weights expects 'probe:value' pairs, got {token!r}"
                )
            probe, value = token.split(":", 1)
            weights[probe] = _number(value, raw, "weights")

    max_evaluations = (
        _integer(raw, "max_evaluations")
        if (raw := section.take("max_evaluations")) is not None
        else 150
    )
    tolerance = (
        _bare_number(raw, "tolerance")
        if (raw := section.take("tolerance")) is not None
        else 1e-6
    )
    confirm = True
    if (raw := section.take("confirm")) is not None:
        confirm = _choice(raw, "confirm", ("true", "false")) == "true"
    return CalibrationSection(
        targets_path=targets,
        parameters=tuple(parameters),
        max_evaluations=max_evaluations,
        tolerance=tolerance,
        coarse_spacing=coarse,
        weights=weights,
        confirm=confirm,
    )


# --- serialization ----------------------------------------------------------

def _fmt(value: float) -> str:
    return repr(float(value))


def _fmt_table(table: tuple[tuple[float, float], ...], unit: str) -> str:
    pairs = " ".join(f"{_fmt(t)}:{_fmt(v)}" for t, v in table)
    return f"{pairs} {unit}"


def serialize_config(cfg: RunConfig) -> str:
    """Emit an equivalent config in canonical SI units; round-trips exactly."""
    lines: list[str] = []

    def emit(section: str, items: list[tuple[str, str]]) -> None:
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {value}" for key, value in items)
        lines.append("")

    emit("tool", [
        ("shoulder_radius", f"{_fmt(cfg.tool.shoulder_radius)} m"),
        ("probe_radius", f"{_fmt(cfg.tool.probe_radius)} m"),
        ("probe_height", f"{_fmt(cfg.tool.probe_height)} m"),
        ("cone_angle", f"{_fmt(cfg.tool.cone_angle)} rad"),
    ])
    proc_items = [
        ("omega", f"{_fmt(cfg.process.omega)} rad/s"),
        ("traverse_speed", f"{_fmt(cfg.process.traverse_speed)} m/s"),
        ("downward_force", f"{_fmt(cfg.process.downward_force)} N"),
    ]
    if cfg.process.torque is not None:
        proc_items.append(("torque", f"{_fmt(cfg.process.torque)} N.m"))
    if cfg.process.traverse_force is not None:
        proc_items.append(("traverse_force", f"{_fmt(cfg.process.traverse_force)} N"))
    proc_items += [
        ("efficiency", _fmt(cfg.process.efficiency)),
        ("tilt_angle", f"{_fmt(cfg.process.tilt_angle)} rad"),
        ("slip_factor", _fmt(cfg.contact.slip_factor)),
        ("friction", _fmt(cfg.contact.friction_coefficient)),
        ("heat_model", cfg.heat_model),
        ("contact_reference_temperature", f"{_fmt(cfg.contact_reference_temperature)} K"),
    ]
    emit("process", proc_items)
    emit("workpiece", [
        ("length", f"{_fmt(cfg.workpiece.length)} m"),
        ("width", f"{_fmt(cfg.workpiece.width)} m"),
        ("thickness", f"{_fmt(cfg.workpiece.thickness)} m"),
        ("joint_offset", f"{_fmt(cfg.workpiece.joint_offset)} m"),
    ])
    emit("material", [
        ("name", cfg.material.name),
        ("density", f"{_fmt(cfg.material.density)} kg/m3"),
        ("emissivity", _fmt(cfg.material.emissivity)),
        ("conductivity", _fmt_table(cfg.material.conductivity_table, "W/mK")),
        ("specific_heat", _fmt_table(cfg.material.specific_heat_table, "J/kgK")),
        ("yield_strength", _fmt_table(cfg.material.yield_strength_table, "Pa")),
    ])
    if cfg.jc_params is not None:
        jc = cfg.jc_params
        items = [
            ("a", f"{_fmt(jc.a)} Pa"),
            ("b", f"{_fmt(jc.b)} Pa"),
            ("c", _fmt(jc.c)),
            ("n", _fmt(jc.n)),
            ("m", _fmt(jc.m)),
            ("t_melt", f"{_fmt(jc.t_melt)} K"),
            ("t_ref", f"{_fmt(jc.t_ref)} K"),
            ("reference_strain_rate", f"{_fmt(jc.eps_dot_ref)} 1/s"),
            ("strain", _fmt(cfg.jc_strain)),
        ]
        if cfg.jc_strain_rate is not None:
            items.append(("strain_rate", f"{_fmt(cfg.jc_strain_rate)} 1/s"))
        emit("johnson_cook", items)
    if cfg.st_params is not None:
        st = cfg.st_params
        emit("sellars_tegart", [
            ("structure_factor", f"{_fmt(st.structure_factor)} 1/s"),
            ("stress_multiplier", f"{_fmt(st.stress_multiplier)} 1/Pa"),
            ("stress_exponent", _fmt(st.stress_exponent)),
            ("activation_energy", f"{_fmt(st.activation_energy)} J/mol"),
        ])

    bottom = cfg.settings.bottom
    if isinstance(bottom, Adiabatic):
        bottom_text = "adiabatic"
    elif isinstance(bottom, PerfectContact):
        bottom_text = "perfect"
    elif isinstance(bottom, SparContact):
        bottom_text = f"spar {_fmt(bottom.spar_width)} m {_fmt(bottom.spar_height)} m"
    else:
        bottom_text = f"gap {_fmt(bottom.h_gap)} W/m2K"
    emit("solver", [
        ("dx", f"{_fmt(cfg.spacing[0])} m"),
        ("dy", f"{_fmt(cfg.spacing[1])} m"),
        ("dz", f"{_fmt(cfg.spacing[2])} m"),
        ("ambient", f"{_fmt(cfg.settings.ambient)} K"),
        ("initial_temperature", f"{_fmt(cfg.settings.start_temperature)} K"),
        ("h_top", f"{_fmt(cfg.settings.h_top)} W/m2K"),
        ("h_side", f"{_fmt(cfg.settings.side_coefficient)} W/m2K"),
        ("bottom", bottom_text),
        ("backing_thickness", f"{_fmt(cfg.settings.backing_thickness)} m"),
        ("flux_profile", cfg.settings.flux_profile),
        ("source_mode", cfg.settings.source_mode),
        ("volumetric_fraction", _fmt(cfg.settings.gamma)),
        ("taylor_quinney", _fmt(cfg.settings.taylor_quinney)),
        ("dt", "auto" if cfg.settings.dt is None else f"{_fmt(cfg.settings.dt)} s"),
        ("tool_start_x", f"{_fmt(cfg.tool_start_x)} m"),
        ("yield_model", cfg.yield_model),
    ])
    sched_items = [
        (f"phase{i + 1}", f"{phase.kind} {_fmt(phase.duration)} s")
        for i, phase in enumerate(cfg.schedule.phases)
    ]
    plunge_rates = [p.plunge_rate for p in cfg.schedule.phases if p.kind == "plunge"]
    if plunge_rates and plunge_rates[0] != 0.0:
        sched_items.append(("plunge_rate", f"{_fmt(plunge_rates[0])} m/s"))
    emit("schedule", sched_items)
    if cfg.probes:
        emit("probes", [
            (name, f"{_fmt(x)} m, {_fmt(y)} m, {_fmt(z)} m")
            for name, (x, y, z) in cfg.probes.items()
        ])
    ff = cfg.flow.field
    emit("flow", [
        ("shear_zone_radius", f"{_fmt(ff.shear_zone_radius)} m"),
        ("rotation_rate", f"{_fmt(ff.rotation_rate)} rad/s"),
        ("traverse_speed", f"{_fmt(ff.traverse_speed)} m/s"),
        ("circulation", f"{_fmt(ff.circulation)} m2/s"),
        ("core_radius", f"{_fmt(ff.core_radius)} m"),
        ("ring_radius", f"{_fmt(ff.ring_radius)} m"),
        ("tracer_count", str(cfg.flow.tracer_count)),
        ("tracer_radius", f"{_fmt(cfg.flow.tracer_radius)} m"),
        ("seed_depth", f"{_fmt(cfg.flow.seed_depth)} m"),
        ("duration", f"{_fmt(cfg.flow.duration)} s"),
        ("dt", f"{_fmt(cfg.flow.dt)} s"),
    ] + (
        [("max_distance", f"{_fmt(cfg.flow.max_distance)} m")]
        if cfg.flow.max_distance is not None
        else []
    ))
    if cfg.calibration is not None:
        cal = cfg.calibration
        items = [
            ("targets", cal.targets_path),
            ("free", " ".join(p.name for p in cal.parameters)),
            ("max_evaluations", str(cal.max_evaluations)),
            ("tolerance", _fmt(cal.tolerance)),
            ("confirm", "true" if cal.confirm else "false"),
        ]
        for p in cal.parameters:
            if p.name == "h_gap":
                items.append((f"{p.name}_bounds", f"{_fmt(p.lower)} {_fmt(p.upper)} W/m2K"))
            else:
                items.append((f"{p.name}_bounds", f"{_fmt(p.lower)} {_fmt(p.upper)}"))
        if cal.coarse_spacing is not None:
            for axis, value in zip(("dx", "dy", "dz"), cal.coarse_spacing):
                items.append((f"coarse_{axis}", f"{_fmt(value)} m"))
        if cal.weights:
            items.append(
                ("weights", " ".join(f"{k}:{_fmt(v)}" for k, v in cal.weights.items()))
            )
        emit("calibration", items)
    emit("output", [
        ("directory", cfg.output_dir),
        ("snapshot_every", str(cfg.snapshot_every)),
    ])
    return "\n".join(lines)
