"""Transient 3D heat conduction on a structured grid with a moving tool source.

Explicit forward-time, centered-space update with harmonic-mean face
conductivities for temperature-dependent conductivity. The grid covers the
workpiece plate and, for the backed bottom-contact options, a backing plate
(or spar strip) meshed below it. The tool heat input is deposited as surface
flux on the shoulder annulus, probe side ring and probe tip disk, plus an
optional uniform volumetric term in the probe-swept cylinder; deposited cell
powers are renormalized so the discrete total matches the analytical one.

Axis convention: x is the welding direction, y transverse, z depth with
layer 0 at the top surface (the shoulder plane).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field as dc_field

import numpy as np

from .core import (
    BottomContact,
    ContactModel,
    GapConductance,
    PerfectContact,
    ProcessParameters,
    SparContact,
    ToolGeometry,
    WeldSchedule,
    WorkpieceGeometry,
)
from .heatgen import (
    SQRT3,
    HeatBreakdown,
    HeatPartition,
    partition_heat,
    surface_heat_breakdown,
)
from .materials import JohnsonCookParams, ThermophysicalTable, johnson_cook_yield

STEFAN_BOLTZMANN = 5.670374419e-8  # W/(m^2 K^4)

FLUX_PROFILES = ("uniform", "linear_in_r")
SOURCE_MODES = ("surface", "surface_plus_volumetric")


class SimulationError(RuntimeError):
    """Raised when a run cannot proceed (instability, invalid state, bad setup)."""


@dataclass(frozen=True)
class SolverSettings:
    """Boundary conditions and discretization policy for a thermal run."""

    ambient: float = 298.0
    h_top: float = 12.0
    h_side: float | None = None
    bottom: BottomContact = dc_field(default_factory=GapConductance)
    flux_profile: str = "linear_in_r"
    dt: float | None = None
    source_mode: str = "surface"
    volumetric_fraction: float | None = None
    taylor_quinney: float = 0.9
    backing_thickness: float = 0.012
    initial_temperature: float | None = None
    stefan_boltzmann: float = STEFAN_BOLTZMANN

    def __post_init__(self) -> None:
        if self.ambient <= 0.0:
            raise ValueError(f"ambient temperature must be > 0 K, got {self.ambient}")
        if self.h_top < 0.0:
            raise ValueError(f"h_top must be >= 0, got {self.h_top}")
        if self.h_side is not None and self.h_side < 0.0:
            raise ValueError(f"h_side must be >= 0, got {self.h_side}")
        if self.flux_profile not in FLUX_PROFILES:
            raise ValueError(f"flux_profile must be one of {FLUX_PROFILES}")
        if self.source_mode not in SOURCE_MODES:
            raise ValueError(f"source_mode must be one of {SOURCE_MODES}")
        if self.dt is not None and self.dt <= 0.0:
            raise ValueError(f"fixed dt must be > 0, got {self.dt}")
        if self.volumetric_fraction is not None and not 0.0 <= self.volumetric_fraction <= 1.0:
            raise ValueError(
                f"volumetric_fraction must lie in [0, 1], got {self.volumetric_fraction}"
            )
        if self.backing_thickness <= 0.0:
            raise ValueError(f"backing_thickness must be > 0, got {self.backing_thickness}")
        if self.initial_temperature is not None and self.initial_temperature <= 0.0:
            raise ValueError(
                f"initial_temperature must be > 0 K, got {self.initial_temperature}"
            )

    @property
    def side_coefficient(self) -> float:
        return self.h_top if self.h_side is None else self.h_side

    @property
    def gamma(self) -> float:
        """Volumetric heat fraction; defaults to 0 (surface) or 1 (volumetric mode)."""
        if self.volumetric_fraction is not None:
            return self.volumetric_fraction
        return 1.0 if self.source_mode == "surface_plus_volumetric" else 0.0

    @property
    def start_temperature(self) -> float:
        return self.ambient if self.initial_temperature is None else self.initial_temperature


class ThermalField:
    """Cell-centered temperature field over workpiece (+ optional backing)."""

    def __init__(
        self,
        shape: tuple[int, int, int],
        spacing: tuple[float, float, float],
        initial_temperature: float,
        workpiece_layers: int | None = None,
        active: np.ndarray | None = None,
        tool_x: float = 0.0,
        tool_y: float = 0.0,
    ):
        nx, ny, nz = shape
        dx, dy, dz = spacing
        if min(nx, ny, nz) < 1:
            raise ValueError(f"grid dims must be >= 1, got {shape}")
        if min(dx, dy, dz) <= 0.0:
            raise ValueError(f"grid spacings must be > 0, got {spacing}")
        if initial_temperature <= 0.0:
            raise ValueError(f"temperatures must be > 0 K, got {initial_temperature}")
        self.shape = (nx, ny, nz)
        self.spacing = (dx, dy, dz)
        self.workpiece_layers = nz if workpiece_layers is None else workpiece_layers
        if not 1 <= self.workpiece_layers <= nz:
            raise ValueError("workpiece_layers must lie in [1, nz]")
        self.T = np.full(shape, float(initial_temperature))
        self.active = np.ones(shape, dtype=bool) if active is None else active.copy()
        if self.active.shape != self.shape:
            raise ValueError("active mask shape must match grid shape")
        if not self.active[:, :, : self.workpiece_layers].all():
            raise ValueError("all workpiece cells must be active")
        self.time = 0.0
        self.tool_x = tool_x
        self.tool_y = tool_y
        self.xc = (np.arange(nx) + 0.5) * dx
        self.yc = (np.arange(ny) + 0.5) * dy
        self.zc = (np.arange(nz) + 0.5) * dz  # depth below the top surface

    @property
    def extent(self) -> tuple[float, float, float]:
        """Physical (x, y, z) size of the grid box."""
        nx, ny, nz = self.shape
        dx, dy, dz = self.spacing
        return nx * dx, ny * dy, nz * dz

    @property
    def cell_volume(self) -> float:
        dx, dy, dz = self.spacing
        return dx * dy * dz

    def copy(self) -> "ThermalField":
        out = ThermalField(
            self.shape, self.spacing, 300.0, self.workpiece_layers, self.active,
            self.tool_x, self.tool_y,
        )
        out.T = self.T.copy()
        out.time = self.time
        return out

    def validate(self) -> None:
        T = self.T[self.active]
        if not np.isfinite(T).all():
            raise SimulationError(f"non-finite temperature at t={self.time:.6g} s")
        if (T <= 0.0).any():
            raise SimulationError(f"non-physical temperature <= 0 K at t={self.time:.6g} s")


def build_thermal_field(
    workpiece: WorkpieceGeometry,
    spacing: tuple[float, float, float],
    bottom: BottomContact,
    backing_thickness: float,
    initial_temperature: float,
    tool_x: float,
    tool_y: float,
) -> ThermalField:
    """Mesh the workpiece plate plus the backing required by the bottom condition.

    Plate extents snap to whole cells. Backing layers are meshed below the
    workpiece for the perfect-contact and spar options; the gap-conductance
    option exchanges heat with an ambient-temperature backing sink instead.
    """
    dx, dy, dz = spacing
    nx = max(2, round(workpiece.length / dx))
    ny = max(2, round(workpiece.width / dy))
    nz_wp = max(1, round(workpiece.thickness / dz))
    if isinstance(bottom, PerfectContact):
        nb = max(1, round(backing_thickness / dz))
    elif isinstance(bottom, SparContact):
        if bottom.spar_width > workpiece.width:
            raise SimulationError(
                f"backing spar width {bottom.spar_width} exceeds workpiece width "
                f"{workpiece.width}"
            )
        nb = max(1, round(bottom.spar_height / dz))
    else:
        nb = 0
    nz = nz_wp + nb
    active = np.ones((nx, ny, nz), dtype=bool)
    if isinstance(bottom, SparContact):
        yc = (np.arange(ny) + 0.5) * dy
        in_strip = np.abs(yc - workpiece.joint_y) <= bottom.spar_width / 2.0
        active[:, ~in_strip, nz_wp:] = False
    return ThermalField(
        (nx, ny, nz), spacing, initial_temperature, nz_wp, active, tool_x, tool_y
    )


def stable_timestep(field: ThermalField, material: ThermophysicalTable) -> float:
    """Explicit-stability time step with a 0.9 safety on the diffusive limit.

    Uses the diffusivity of the currently most diffusive cell.
    """
    T = field.T[field.active]
    kappa = material.conductivity(T) / (material.density * material.specific_heat(T))
    kappa_max = float(np.max(kappa))
    dx, dy, dz = field.spacing
    inv = 1.0 / dx**2 + 1.0 / dy**2 + 1.0 / dz**2
    return 0.9 * 0.5 / (kappa_max * inv)


def _largest_stable_timestep(field: ThermalField, material: ThermophysicalTable) -> float:
    # Table-wide maximum diffusivity: a phase-long step chosen from this bound
    # remains below the per-step limit at any reachable temperature.
    dx, dy, dz = field.spacing
    inv = 1.0 / dx**2 + 1.0 / dy**2 + 1.0 / dz**2
    return 0.9 * 0.5 / (material.max_diffusivity() * inv)


def top_loss_flux(T, settings: SolverSettings, emissivity: float):
    """Outgoing radiative + convective flux (W/m^2) at the free top surface."""
    ta = settings.ambient
    return settings.stefan_boltzmann * emissivity * (T**4 - ta**4) + settings.h_top * (T - ta)


def bottom_loss_flux(T, settings: SolverSettings):
    """Outgoing bottom flux (W/m^2) for the non-meshed bottom conditions.

    Zero for the adiabatic option; gap conductance couples the workpiece
    bottom to the backing sink held at ambient. The perfect-contact and spar
    options exchange heat by in-grid conduction instead and contribute
    nothing here.
    """
    if isinstance(settings.bottom, GapConductance):
        return settings.bottom.h_gap * (np.asarray(T, dtype=float) - settings.ambient)
    return np.zeros_like(np.asarray(T, dtype=float))


@dataclass
class EnergyLedger:
    """Per-boundary energy bookkeeping for a run or a single schedule phase."""

    label: str
    input_j: float = 0.0
    stored_j: float = 0.0
    top_convection_j: float = 0.0
    top_radiation_j: float = 0.0
    side_j: float = 0.0
    bottom_j: float = 0.0

    @property
    def losses_j(self) -> float:
        return self.top_convection_j + self.top_radiation_j + self.side_j + self.bottom_j

    @property
    def closure_rel(self) -> float:
        scale = max(abs(self.input_j), abs(self.stored_j), abs(self.losses_j), 1e-30)
        return abs(self.input_j - self.stored_j - self.losses_j) / scale

    def absorb(self, other: "EnergyLedger") -> None:
        self.input_j += other.input_j
        self.stored_j += other.stored_j
        self.top_convection_j += other.top_convection_j
        self.top_radiation_j += other.top_radiation_j
        self.side_j += other.side_j
        self.bottom_j += other.bottom_j


@dataclass
class StepEnergy:
    input_j: float
    stored_j: float
    top_convection_j: float
    top_radiation_j: float
    side_j: float
    bottom_j: float


@dataclass
class SourceMasks:
    """Tool-position-dependent cell sets used for deposition and contact sampling."""

    rho: np.ndarray  # top-view distance of each column to the tool axis
    shoulder: np.ndarray
    ring: np.ndarray
    disk: np.ndarray
    side_layers: np.ndarray
    tip_layer: int
    tool_x: float
    tool_y: float


def source_masks(field: ThermalField, geom: ToolGeometry) -> SourceMasks:
    """Rasterized shoulder annulus, probe side ring, tip disk and swept layers.

    Each surface set falls back to the column nearest the tool axis when the
    grid is too coarse to resolve it, so a deposition target is never lost.
    """
    dx, dy, _ = field.spacing
    rx = field.xc - field.tool_x
    ry = field.yc - field.tool_y
    rho = np.hypot(rx[:, None], ry[None, :])

    shoulder = (rho > geom.probe_radius) & (rho <= geom.shoulder_radius)
    side_layers = np.nonzero(field.zc[: field.workpiece_layers] <= geom.probe_height)[0]
    if side_layers.size == 0:
        side_layers = np.array([0])
    ring_tol = 0.5 * math.hypot(dx, dy)
    ring = np.abs(rho - geom.probe_radius) <= ring_tol
    tip_layer = int(np.argmin(np.abs(field.zc[: field.workpiece_layers] - geom.probe_height)))
    disk = rho <= geom.probe_radius

    nearest = np.unravel_index(np.argmin(rho), rho.shape)
    for name, mask in (("shoulder", shoulder), ("ring", ring), ("disk", disk)):
        if not mask.any():
            mask[nearest] = True
    return SourceMasks(
        rho, shoulder, ring, disk, side_layers, tip_layer, field.tool_x, field.tool_y
    )


def _check_footprint(field: ThermalField, geom: ToolGeometry) -> None:
    lx, ly, _ = field.extent
    r = geom.shoulder_radius
    if not (r <= field.tool_x <= lx - r and r <= field.tool_y <= ly - r):
        raise SimulationError(
            f"tool footprint (radius {r:.4g}) at ({field.tool_x:.4g}, {field.tool_y:.4g}) "
            f"extends outside the {lx:.4g} x {ly:.4g} grid"
        )


def apply_tool_source(
    field: ThermalField,
    geom: ToolGeometry,
    breakdown: HeatBreakdown,
    partition: HeatPartition,
    flux_profile: str = "linear_in_r",
    masks: SourceMasks | None = None,
) -> np.ndarray:
    """Rasterize the tool heat input into a per-cell power array (W).

    Surface heat lands on the shoulder annulus (top layer), the probe side
    ring and the probe tip disk in the breakdown's proportions; volumetric
    heat fills the probe-swept cylinder uniformly. Each component is
    renormalized so the deposited total equals the analytical one exactly.
    ``masks`` may be supplied to reuse a rasterization at the same tool pose.
    """
    if flux_profile not in FLUX_PROFILES:
        raise ValueError(f"flux_profile must be one of {FLUX_PROFILES}")
    _check_footprint(field, geom)
    sources = np.zeros(field.shape)
    q_s = partition.surface_w
    q_v = partition.volumetric_w
    if q_s == 0.0 and q_v == 0.0:
        return sources

    if masks is None:
        masks = source_masks(field, geom)
    rho = masks.rho

    def deposit(cells: np.ndarray, layers, target: float, radial: bool) -> None:
        if target == 0.0:
            return
        weights = rho * cells if radial else cells.astype(float)
        total = float(weights.sum())
        if total <= 0.0:  # radial weighting degenerate on an on-axis cell
            weights = cells.astype(float)
            total = float(weights.sum())
        layers = np.atleast_1d(layers)
        scale = target / (total * layers.size)
        for k in layers:
            sources[:, :, k] += weights * scale

    radial = flux_profile == "linear_in_r"
    deposit(masks.shoulder, 0, q_s * breakdown.f_shoulder, radial)
    deposit(masks.ring, masks.side_layers, q_s * breakdown.f_probe_side, False)
    deposit(masks.disk, masks.tip_layer, q_s * breakdown.f_probe_tip, radial)
    deposit(masks.disk, masks.side_layers, q_v, False)
    return sources


def _lateral_exposure(active: np.ndarray, axis: int, low: bool) -> np.ndarray:
    """Cells whose face on the given lateral side meets void or the grid edge."""
    exposed = np.zeros_like(active)
    edge = [slice(None)] * 3
    edge[axis] = 0 if low else -1
    exposed[tuple(edge)] = active[tuple(edge)]
    inner = [slice(None)] * 3
    neigh = [slice(None)] * 3
    inner[axis] = slice(1, None) if low else slice(None, -1)
    neigh[axis] = slice(None, -1) if low else slice(1, None)
    exposed[tuple(inner)] |= active[tuple(inner)] & ~active[tuple(neigh)]
    return exposed


def step(
    field: ThermalField,
    material: ThermophysicalTable,
    settings: SolverSettings,
    dt: float,
    sources: np.ndarray | None = None,
    covered_top: np.ndarray | None = None,
) -> StepEnergy:
    """Advance the field by one explicit step; refuses an unstable dt.

    ``covered_top`` marks top-surface columns shadowed by the tool shoulder,
    which take no free-surface loss. Returns the step's energy bookkeeping in
    joules; conduction between active cells is internal and nets to zero.
    """
    if dt <= 0.0:
        raise SimulationError(f"dt must be > 0, got {dt}")
    limit = stable_timestep(field, material)
    if dt > limit * (1.0 + 1e-9):
        raise SimulationError(
            f"dt={dt:.6g} s exceeds the stability limit {limit:.6g} s; refusing to step"
        )

    T = field.T
    active = field.active
    dx, dy, dz = field.spacing
    areas = (dy * dz, dx * dz, dx * dy)

    k_cell = np.where(active, material.conductivity(T), 0.0)
    power = np.zeros_like(T)

    for axis in range(3):
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        lo, hi = tuple(lo), tuple(hi)
        k1, k2 = k_cell[lo], k_cell[hi]
        ksum = k1 + k2
        k_face = np.where(ksum > 0.0, 2.0 * k1 * k2 / np.where(ksum > 0.0, ksum, 1.0), 0.0)
        flux = k_face * (T[hi] - T[lo]) * (areas[axis] / field.spacing[axis])
        power[lo] += flux
        power[hi] -= flux

    # top surface: radiation + convection outside the shoulder footprint
    ta = settings.ambient
    top_T = T[:, :, 0]
    exposed_top = np.ones(field.shape[:2], dtype=bool) if covered_top is None else ~covered_top
    top_rad = np.where(
        exposed_top,
        settings.stefan_boltzmann * material.emissivity * (top_T**4 - ta**4) * areas[2],
        0.0,
    )
    top_conv = np.where(exposed_top, settings.h_top * (top_T - ta) * areas[2], 0.0)
    power[:, :, 0] -= top_rad + top_conv

    # lateral faces: convection wherever an active cell meets void or the edge
    h_side = settings.side_coefficient
    side_total = 0.0
    if h_side > 0.0:
        for axis in (0, 1):
            for low in (True, False):
                exposed = _lateral_exposure(active, axis, low)
                loss = np.where(exposed, h_side * (T - ta) * areas[axis], 0.0)
                power -= loss
                side_total += float(loss.sum())

    # workpiece bottom for the non-meshed conditions
    bottom_total = 0.0
    if isinstance(settings.bottom, GapConductance):
        kb = field.workpiece_layers - 1
        bottom = bottom_loss_flux(T[:, :, kb], settings) * areas[2]
        power[:, :, kb] -= bottom
        bottom_total = float(bottom.sum())

    if sources is not None:
        power += sources

    heat_capacity = material.density * material.specific_heat(T) * field.cell_volume
    dT = np.where(active, dt * power / heat_capacity, 0.0)
    field.T = T + dT
    field.time += dt
    field.validate()

    return StepEnergy(
        input_j=(float(sources.sum()) if sources is not None else 0.0) * dt,
        stored_j=float(np.sum(heat_capacity * dT)),
        top_convection_j=float(top_conv.sum()) * dt,
        top_radiation_j=float(top_rad.sum()) * dt,
        side_j=side_total * dt,
        bottom_j=bottom_total * dt,
    )


@dataclass
class SimulationHistory:
    """Probe traces, peak field and energy accounting returned by a run."""

    times: np.ndarray
    probe_traces: dict[str, np.ndarray]
    peak_field: np.ndarray
    peak_temperature: float
    phase_ledgers: list[EnergyLedger]
    ledger: EnergyLedger
    field: ThermalField
    steps: int


class WeldThermalModel:
    """Full weld simulation: schedule-driven moving source plus boundary losses.

    The contact heat model recomputes the yield strength at the mean
    temperature of the tool-contact cells every step, so heat input softens
    as the weld heats up; the torque model deposits the measured power
    instead. Either way the power efficiency factor scales what enters the
    workpiece, and the plunge phase ramps deposition linearly from zero.
    """

    def __init__(
        self,
        tool: ToolGeometry,
        workpiece: WorkpieceGeometry,
        material: ThermophysicalTable,
        contact: ContactModel,
        process: ProcessParameters,
        schedule: WeldSchedule,
        settings: SolverSettings,
        spacing: tuple[float, float, float],
        probes: dict[str, tuple[float, float, float]] | None = None,
        tool_start_x: float | None = None,
        heat_model: str = "contact",
        yield_model: str = "table",
        jc_params: JohnsonCookParams | None = None,
        jc_strain: float = 0.0,
        jc_strain_rate: float | None = None,
    ):
        if workpiece.thickness < tool.probe_height:
            raise SimulationError(
                f"probe height {tool.probe_height} exceeds workpiece thickness "
                f"{workpiece.thickness}"
            )
        if heat_model not in ("contact", "torque"):
            raise SimulationError(f"unknown heat_model {heat_model!r}")
        if heat_model == "torque" and process.torque is None:
            raise SimulationError("torque heat model requires a measured torque")
        if yield_model not in ("table", "johnson_cook"):
            raise SimulationError(f"unknown yield_model {yield_model!r}")
        if yield_model == "johnson_cook" and jc_params is None:
            raise SimulationError("johnson_cook yield model requires its parameter set")

        self.tool = tool
        self.workpiece = workpiece
        self.material = material
        self.contact = contact
        self.process = process
        self.schedule = schedule
        self.settings = settings
        self.heat_model = heat_model
        self.yield_model = yield_model
        self.jc_params = jc_params
        self.jc_strain = jc_strain
        self.jc_strain_rate = jc_strain_rate
        self._fractions = surface_heat_breakdown(tool, 1.0, 1.0)
        self._masks: SourceMasks | None = None

        x0 = workpiece.length / 4.0 if tool_start_x is None else tool_start_x
        self.field = build_thermal_field(
            workpiece,
            spacing,
            settings.bottom,
            settings.backing_thickness,
            settings.start_temperature,
            x0,
            workpiece.joint_y,
        )
        _check_footprint(self.field, tool)
        end_x = x0 + sum(p.traverse_speed * p.duration for p in schedule.phases)
        lx, ly, lz = self.field.extent
        if end_x + tool.shoulder_radius > lx:
            raise SimulationError(
                f"traverse ends at x={end_x:.4g} m; the tool footprint would leave "
                f"the {lx:.4g} m long grid"
            )

        self.probes = dict(probes or {})
        self._probe_idx: dict[str, tuple[int, int, int]] = {}
        for name, (px, py, pz) in self.probes.items():
            if not (0.0 <= px <= lx and 0.0 <= py <= ly and 0.0 <= pz <= lz):
                raise SimulationError(
                    f"probe {name!r} at ({px}, {py}, {pz}) lies outside the domain"
                )
            i = min(int(px / spacing[0]), self.field.shape[0] - 1)
            j = min(int(py / spacing[1]), self.field.shape[1] - 1)
            k = min(int(pz / spacing[2]), self.field.shape[2] - 1)
            self._probe_idx[name] = (i, j, k)

    # -- heat input ---------------------------------------------------------

    def _current_masks(self) -> SourceMasks:
        m = self._masks
        if m is None or m.tool_x != self.field.tool_x or m.tool_y != self.field.tool_y:
            m = source_masks(self.field, self.tool)
            self._masks = m
        return m

    def contact_temperature(self) -> float:
        """Temperature of the hottest tool-contact cell.

        The stress-bearing shear layer sits at the welding temperature, so
        the sticking branch is evaluated there; a mean over the whole contact
        patch would be diluted by cold material ahead of the tool and let the
        heat input grow with traverse speed.
        """
        masks = self._current_masks()
        T = self.field.T
        vals = [T[:, :, 0][masks.shoulder]]
        for k in masks.side_layers:
            vals.append(T[:, :, k][masks.ring])
        vals.append(T[:, :, masks.tip_layer][masks.disk])
        return float(np.max(np.concatenate(vals)))

    def _yield_strength(self, temperature: float) -> float:
        if self.yield_model == "johnson_cook":
            rate = self.jc_strain_rate or self.jc_params.eps_dot_ref
            return johnson_cook_yield(self.jc_strain, rate, temperature, self.jc_params)
        return float(self.material.yield_strength(temperature))

    def heat_breakdown(self, omega: float, ramp: float = 1.0) -> HeatBreakdown:
        """Per-surface heat deposited into the workpiece at the current state (W)."""
        eta = self.process.efficiency
        if self.heat_model == "torque":
            q = self.process.torque * omega * eta * ramp
            f = self._fractions
            return HeatBreakdown.from_components(
                q * f.f_shoulder, q * f.f_probe_side, q * f.f_probe_tip
            )
        sigma_y = self._yield_strength(self.contact_temperature())
        c = self.contact
        tau = (
            c.slip_factor * sigma_y / SQRT3
            + (1.0 - c.slip_factor) * c.friction_coefficient * c.contact_pressure
        )
        return surface_heat_breakdown(self.tool, omega, tau).scaled(eta * ramp)

    # -- time marching ------------------------------------------------------

    def _phase_dt(self) -> float:
        if self.settings.dt is not None:
            limit = stable_timestep(self.field, self.material)
            if self.settings.dt > limit * (1.0 + 1e-9):
                raise SimulationError(
                    f"fixed dt={self.settings.dt:.6g} s exceeds the stability limit "
                    f"{limit:.6g} s"
                )
            return self.settings.dt
        return _largest_stable_timestep(self.field, self.material)

    def run(self, snapshot_every: int = 0, snapshot_sink=None) -> SimulationHistory:
        """March through the weld schedule and collect traces and accounting."""
        fld = self.field
        times = [fld.time]
        traces = {name: [fld.T[idx]] for name, idx in self._probe_idx.items()}
        peak = fld.T.copy()
        phase_ledgers: list[EnergyLedger] = []
        total = EnergyLedger("total")
        step_count = 0

        for n_phase, phase in enumerate(self.schedule.phases):
            ledger = EnergyLedger(f"{n_phase + 1}:{phase.kind}")
            dt_phase = self._phase_dt()
            elapsed = 0.0
            while elapsed < phase.duration * (1.0 - 1e-12):
                dt = min(dt_phase, phase.duration - elapsed)
                ramp = 1.0
                if phase.kind == "plunge":
                    ramp = min(1.0, (elapsed + 0.5 * dt) / phase.duration)
                masks = self._current_masks()
                sources = None
                if phase.omega > 0.0:
                    bd = self.heat_breakdown(phase.omega, ramp)
                    part = partition_heat(
                        bd.total_w, self.settings.gamma, self.settings.taylor_quinney
                    )
                    sources = apply_tool_source(
                        fld, self.tool, bd, part, self.settings.flux_profile, masks
                    )
                covered = masks.rho <= self.tool.shoulder_radius
                try:
                    energy = step(fld, self.material, self.settings, dt, sources, covered)
                except SimulationError as exc:
                    raise SimulationError(
                        f"phase {n_phase + 1} ({phase.kind}) at t={fld.time:.6g} s: {exc}"
                    ) from exc
                if phase.kind == "traverse":
                    fld.tool_x += phase.traverse_speed * dt
                elapsed += dt
                step_count += 1

                ledger.input_j += energy.input_j
                ledger.stored_j += energy.stored_j
                ledger.top_convection_j += energy.top_convection_j
                ledger.top_radiation_j += energy.top_radiation_j
                ledger.side_j += energy.side_j
                ledger.bottom_j += energy.bottom_j

                np.maximum(peak, fld.T, out=peak)
                times.append(fld.time)
                for name, idx in self._probe_idx.items():
                    traces[name].append(fld.T[idx])
                if snapshot_every and snapshot_sink and step_count % snapshot_every == 0:
                    snapshot_sink(step_count, fld.time, fld.copy())
            phase_ledgers.append(ledger)
            total.absorb(ledger)

        return SimulationHistory(
            times=np.asarray(times),
            probe_traces={name: np.asarray(vals) for name, vals in traces.items()},
            peak_field=peak,
            peak_temperature=float(peak[fld.active].max()),
            phase_ledgers=phase_ledgers,
            ledger=total,
            field=fld,
            steps=step_count,
        )
