"""Tool, workpiece, process and weld-schedule types shared across the simulator.

Everything is an immutable value validated at construction; instances can be
shared freely between threads and simulation runs. All quantities are SI
(m, s, K, N, Pa, rad); config-file unit conversion happens at parse time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


class InvalidGeometryError(ValueError):
    """A geometric or process invariant was violated at construction time."""


@dataclass(frozen=True)
class ToolGeometry:
    """Simplified FSW tool: conical or flat shoulder, cylindrical probe, flat tip.

    ``cone_angle`` is the shoulder cone angle in radians; 0 denotes a flat
    shoulder. The probe (pin) is a vertical cylinder of radius
    ``probe_radius`` and height ``probe_height`` below the shoulder plane.
    """

    shoulder_radius: float
    probe_radius: float
    probe_height: float
    cone_angle: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.probe_radius < self.shoulder_radius:
            raise InvalidGeometryError(
                f"need 0 < probe_radius < shoulder_radius, got "
                f"probe_radius={self.probe_radius}, shoulder_radius={self.shoulder_radius}"
            )
        if self.probe_height <= 0.0:
            raise InvalidGeometryError(f"probe_height must be > 0, got {self.probe_height}")
        if not 0.0 <= self.cone_angle < math.pi / 2.0:
            raise InvalidGeometryError(
                f"cone_angle must lie in [0, pi/2), got {self.cone_angle}"
            )

    @property
    def shoulder_annulus_area(self) -> float:
        """Projected area of the shoulder annulus (probe footprint excluded)."""
        return math.pi * (self.shoulder_radius**2 - self.probe_radius**2)


@dataclass(frozen=True)
class ProcessParameters:
    """Machine-side weld settings.

    ``torque`` and ``traverse_force`` are optional measured values used by the
    torque-based power estimate. ``tilt_angle`` is stored for completeness but
    has no thermal effect in this model. ``efficiency`` is the fraction of
    tool mechanical power that enters the weld as heat; the remainder is lost
    into the tool (about 5% in practice, hence the 0.95 default).
    """

    omega: float
    traverse_speed: float
    downward_force: float
    torque: float | None = None
    traverse_force: float | None = None
    efficiency: float = 0.95
    tilt_angle: float = 0.0

    def __post_init__(self) -> None:
        if self.omega < 0.0:
            raise InvalidGeometryError(f"omega must be >= 0, got {self.omega}")
        if self.traverse_speed < 0.0:
            raise InvalidGeometryError(f"traverse_speed must be >= 0, got {self.traverse_speed}")
        if self.downward_force < 0.0:
            raise InvalidGeometryError(f"downward_force must be >= 0, got {self.downward_force}")
        if self.torque is not None and self.torque < 0.0:
            raise InvalidGeometryError(f"torque must be >= 0, got {self.torque}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise InvalidGeometryError(f"efficiency must lie in [0, 1], got {self.efficiency}")


@dataclass(frozen=True)
class ContactModel:
    """Tool/workpiece interface state.

    ``slip_factor`` is the dimensionless contact state variable: the ratio of
    workpiece surface speed to tool surface speed. 0 is pure sliding, 1 pure
    sticking, anything between a partial sliding/sticking state.
    """

    slip_factor: float
    friction_coefficient: float
    contact_pressure: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.slip_factor <= 1.0:
            raise InvalidGeometryError(f"slip_factor must lie in [0, 1], got {self.slip_factor}")
        if self.friction_coefficient <= 0.0:
            raise InvalidGeometryError(
                f"friction_coefficient must be > 0, got {self.friction_coefficient}"
            )
        if self.contact_pressure < 0.0:
            raise InvalidGeometryError(
                f"contact_pressure must be >= 0, got {self.contact_pressure}"
            )

    def slip_rate(self, v_tool: float) -> float:
        """Velocity difference between tool and workpiece surfaces (m/s)."""
        return (1.0 - self.slip_factor) * v_tool


@dataclass(frozen=True)
class WorkpieceGeometry:
    """Plate dimensions; the weld line runs along x at y = width/2 + joint_offset."""

    length: float
    width: float
    thickness: float
    joint_offset: float = 0.0

    def __post_init__(self) -> None:
        for name in ("length", "width", "thickness"):
            if getattr(self, name) <= 0.0:
                raise InvalidGeometryError(f"{name} must be > 0, got {getattr(self, name)}")
        if abs(self.joint_offset) >= self.width / 2.0:
            raise InvalidGeometryError(
                f"joint_offset {self.joint_offset} places the weld line outside the plate"
            )

    @property
    def joint_y(self) -> float:
        return self.width / 2.0 + self.joint_offset


# --- bottom-surface contact condition (workpiece / backing plate) ----------

@dataclass(frozen=True)
class Adiabatic:
    """No backing plate; the lower workpiece surface exchanges no heat."""


@dataclass(frozen=True)
class PerfectContact:
    """Backing plate meshed below the workpiece with temperature continuity."""


@dataclass(frozen=True)
class SparContact:
    """Backing spar strip under the weld line; adiabatic outside its footprint."""

    spar_width: float
    spar_height: float

    def __post_init__(self) -> None:
        if self.spar_width <= 0.0:
            raise InvalidGeometryError(f"spar_width must be > 0, got {self.spar_width}")
        if self.spar_height <= 0.0:
            raise InvalidGeometryError(f"spar_height must be > 0, got {self.spar_height}")


@dataclass(frozen=True)
class GapConductance:
    """Finite contact conductance between workpiece bottom and the backing sink."""

    h_gap: float = 1000.0

    def __post_init__(self) -> None:
        if self.h_gap <= 0.0:
            raise InvalidGeometryError(f"h_gap must be > 0, got {self.h_gap}")


BottomContact = Adiabatic | PerfectContact | SparContact | GapConductance


# --- weld schedule ----------------------------------------------------------

_PHASE_ORDER = {"plunge": 0, "dwell": 1, "traverse": 2}


@dataclass(frozen=True)
class WeldPhase:
    """One schedule phase: plunge, dwell or traverse."""

    kind: str
    duration: float
    omega: float
    traverse_speed: float = 0.0
    plunge_rate: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in _PHASE_ORDER:
            raise InvalidGeometryError(f"unknown phase kind {self.kind!r}")
        if self.duration <= 0.0:
            raise InvalidGeometryError(f"phase duration must be > 0, got {self.duration}")
        if self.kind == "traverse":
            if self.traverse_speed <= 0.0:
                raise InvalidGeometryError("traverse phase requires traverse_speed > 0")
        elif self.traverse_speed != 0.0:
            raise InvalidGeometryError(f"{self.kind} phase must have traverse_speed == 0")
        if self.kind in ("dwell", "traverse") and self.omega <= 0.0:
            raise InvalidGeometryError(f"{self.kind} phase requires omega > 0")
        if self.omega < 0.0:
            raise InvalidGeometryError(f"omega must be >= 0, got {self.omega}")
        if self.kind != "plunge" and self.plunge_rate != 0.0:
            raise InvalidGeometryError("plunge_rate only applies to plunge phases")


@dataclass(frozen=True)
class WeldSchedule:
    """Ordered plunge -> dwell -> traverse phase timeline."""

    phases: tuple[WeldPhase, ...]

    def __post_init__(self) -> None:
        if not self.phases:
            raise InvalidGeometryError("schedule must contain at least one phase")
        ranks = [_PHASE_ORDER[p.kind] for p in self.phases]
        if any(b < a for a, b in zip(ranks, ranks[1:])):
            raise InvalidGeometryError(
                "phases must appear in plunge -> dwell -> traverse order"
            )

    @property
    def total_duration(self) -> float:
        return sum(p.duration for p in self.phases)


def shoulder_contact_pressure(downward_force: float, geom: ToolGeometry) -> float:
    """Mean contact pressure from the downward force over the shoulder annulus.

    The probe footprint is excluded from the bearing area: the probe tip bears
    on material below the shoulder plane, not on it.
    """
    if downward_force < 0.0:
        raise ValueError(f"downward_force must be >= 0, got {downward_force}")
    return downward_force / geom.shoulder_annulus_area
