"""Friction stir welding process thermal simulator."""

from .calibrate import (
    CalibrationProblem,
    CalibrationResult,
    ParameterSpec,
    TargetTrace,
    calibrate,
    objective,
)
from .core import (
    Adiabatic,
    ContactModel,
    GapConductance,
    InvalidGeometryError,
    PerfectContact,
    ProcessParameters,
    SparContact,
    ToolGeometry,
    WeldPhase,
    WeldSchedule,
    WorkpieceGeometry,
    shoulder_contact_pressure,
)
from .flow import FlowDomainError, FlowField, TracerPath, advect_tracers, velocity_at
from .heatgen import (
    HeatBreakdown,
    HeatPartition,
    PowerResult,
    heat_fractions,
    net_heat_input,
    partition_heat,
    plastic_dissipation_density,
    power_from_torque,
    slip_factor,
    surface_heat_breakdown,
    total_heat_mixed,
    total_heat_sliding,
    total_heat_sticking,
)
from .materials import (
    JohnsonCookParams,
    SellarsTegartParams,
    ThermophysicalTable,
    johnson_cook_yield,
    sellars_tegart_flow_stress,
    yield_shear_stress,
    zener_hollomon,
)
from .solver import (
    EnergyLedger,
    SimulationError,
    SimulationHistory,
    SolverSettings,
    ThermalField,
    WeldThermalModel,
    apply_tool_source,
    bottom_loss_flux,
    build_thermal_field,
    stable_timestep,
    step,
    top_loss_flux,
)

__version__ = "0.1.0"
