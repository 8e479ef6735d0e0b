"""Analytical heat generation at the tool/workpiece interface.

Per-surface contributions for the simplified conical-shoulder tool, obtained
by integrating dQ = omega * r * tau_contact * dA over each contact surface:

    shoulder:   Q1 = (2/3) * pi * omega * tau * (Rs^3 - Rp^3) * (1 + tan(alpha))
    probe side: Q2 =  2    * pi * omega * tau * Rp^2 * Hp
    probe tip:  Q3 = (2/3) * pi * omega * tau * Rp^3

The contact shear stress tau depends on the interface state: yield shear
stress sigma_y/sqrt(3) under sticking, mu*p Coulomb friction under sliding,
and a slip-factor-weighted blend of the two in between. The total can also
be split into a surface-flux part and a volumetric plastic-dissipation part.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .core import ToolGeometry

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class HeatBreakdown:
    """Per-surface heat generation in watts plus the geometric fractions."""

    shoulder_w: float
    probe_side_w: float
    probe_tip_w: float
    total_w: float
    f_shoulder: float
    f_probe_side: float
    f_probe_tip: float

    def __post_init__(self) -> None:
        if self.total_w != self.shoulder_w + self.probe_side_w + self.probe_tip_w:
            raise ValueError("total_w must equal the exact sum of the three components")
        if self.total_w > 0.0:
            if abs(self.f_shoulder + self.f_probe_side + self.f_probe_tip - 1.0) > 1e-12:
                raise ValueError("heat fractions must sum to 1")
            for f in (self.f_shoulder, self.f_probe_side, self.f_probe_tip):
                if not 0.0 <= f <= 1.0:
                    raise ValueError(f"heat fraction {f} outside [0, 1]")

    @classmethod
    def from_components(cls, q1: float, q2: float, q3: float) -> "HeatBreakdown":
        total = q1 + q2 + q3
        if total > 0.0:
            f1, f2, f3 = q1 / total, q2 / total, q3 / total
            # force an exact unit sum against rounding in the divisions
            f3 = 1.0 - f1 - f2
        else:
            f1 = f2 = f3 = 0.0
        return cls(q1, q2, q3, total, f1, f2, f3)

    def scaled(self, factor: float) -> "HeatBreakdown":
        """Same fractions, components scaled by ``factor`` (e.g. a power ramp)."""
        return HeatBreakdown.from_components(
            self.shoulder_w * factor, self.probe_side_w * factor, self.probe_tip_w * factor
        )


@dataclass(frozen=True)
class HeatPartition:
    """Split of the total heat input into volumetric and surface contributions."""

    total_w: float
    volumetric_fraction: float
    volumetric_w: float
    surface_w: float
    taylor_quinney: float = 0.9


def slip_factor(v_workpiece: float, v_tool: float) -> float:
    """Contact state variable: workpiece surface speed over tool surface speed.

    Works identically with angular speeds taken at the same radius. 0 is
    sliding, 1 sticking, intermediate values partial sliding/sticking.
    """
    if v_tool <= 0.0:
        raise ValueError(f"tool surface speed must be > 0, got {v_tool}")
    if v_workpiece < 0.0:
        raise ValueError(f"workpiece surface speed must be >= 0, got {v_workpiece}")
    if v_workpiece > v_tool:
        raise ValueError(
            f"workpiece surface speed {v_workpiece} exceeds tool surface speed {v_tool}; "
            "there is no over-speed contact state"
        )
    return v_workpiece / v_tool


def surface_heat_breakdown(
    geom: ToolGeometry, omega: float, tau_contact: float
) -> HeatBreakdown:
    """Shoulder / probe-side / probe-tip heat at uniform contact shear stress."""
    if omega < 0.0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    if tau_contact < 0.0:
        raise ValueError(f"tau_contact must be >= 0, got {tau_contact}")
    rs3 = geom.shoulder_radius**3
    rp3 = geom.probe_radius**3
    base = math.pi * omega * tau_contact
    q1 = (2.0 / 3.0) * base * (rs3 - rp3) * (1.0 + math.tan(geom.cone_angle))
    q2 = 2.0 * base * geom.probe_radius**2 * geom.probe_height
    q3 = (2.0 / 3.0) * base * rp3
    return HeatBreakdown.from_components(q1, q2, q3)


def heat_fractions(geom: ToolGeometry) -> tuple[float, float, float]:
    """Per-surface heat fractions; pure geometry ratios, independent of omega and tau."""
    bd = surface_heat_breakdown(geom, omega=1.0, tau_contact=1.0)
    return bd.f_shoulder, bd.f_probe_side, bd.f_probe_tip


def total_heat_sticking(geom: ToolGeometry, omega: float, sigma_yield: float) -> float:
    """Total heat under full sticking: tau is the von Mises yield shear stress."""
    if sigma_yield < 0.0:
        raise ValueError(f"sigma_yield must be >= 0, got {sigma_yield}")
    return surface_heat_breakdown(geom, omega, sigma_yield / SQRT3).total_w


def total_heat_sliding(
    geom: ToolGeometry, omega: float, friction_coefficient: float, pressure: float
) -> float:
    """Total heat under full sliding: tau is the Coulomb friction stress mu*p."""
    if friction_coefficient < 0.0:
        raise ValueError(f"friction_coefficient must be >= 0, got {friction_coefficient}")
    if pressure < 0.0:
        raise ValueError(f"pressure must be >= 0, got {pressure}")
    return surface_heat_breakdown(geom, omega, friction_coefficient * pressure).total_w


def total_heat_mixed(
    geom: ToolGeometry,
    omega: float,
    slip: float,
    sigma_yield: float,
    friction_coefficient: float,
    pressure: float,
) -> float:
    """Slip-factor-weighted blend of the sticking and sliding totals."""
    if not 0.0 <= slip <= 1.0:
        raise ValueError(f"slip factor must lie in [0, 1], got {slip}")
    q_stick = total_heat_sticking(geom, omega, sigma_yield)
    q_slide = total_heat_sliding(geom, omega, friction_coefficient, pressure)
    return slip * q_stick + (1.0 - slip) * q_slide


def flat_shoulder_total(geom: ToolGeometry, omega: float, tau_contact: float) -> float:
    """Closed-form total for a flat shoulder: (2/3) pi w tau (Rs^3 + 3 Rp^2 Hp)."""
    if geom.cone_angle != 0.0:
        raise ValueError("flat-shoulder expression requires cone_angle == 0")
    return (
        (2.0 / 3.0)
        * math.pi
        * omega
        * tau_contact
        * (geom.shoulder_radius**3 + 3.0 * geom.probe_radius**2 * geom.probe_height)
    )


@dataclass(frozen=True)
class PowerResult:
    """Tool input power with the traverse contribution reported separately."""

    total_w: float
    spindle_w: float
    traverse_w: float
    traverse_share: float


def power_from_torque(
    torque: float,
    omega: float,
    traverse_force: float = 0.0,
    traverse_speed: float = 0.0,
    include_traverse: bool = False,
) -> PowerResult:
    """Input power from measured torque; P = M*omega (+ F_trans*v_trans).

    The traverse term is normally negligible (around 1% of the total) and is
    excluded from ``total_w`` unless ``include_traverse`` is set, but it is
    always reported so its share can be checked per run.
    """
    if torque < 0.0:
        raise ValueError(f"torque must be >= 0, got {torque}")
    if omega < 0.0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    spindle = torque * omega
    traverse = traverse_force * traverse_speed
    total = spindle + traverse if include_traverse else spindle
    combined = spindle + traverse
    share = traverse / combined if combined > 0.0 else 0.0
    return PowerResult(total, spindle, traverse, share)


def net_heat_input(power: float, efficiency: float) -> float:
    """Heat entering the weld: input power times the power efficiency factor."""
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError(f"efficiency must lie in [0, 1], got {efficiency}")
    return power * efficiency


def partition_heat(
    total_w: float, volumetric_fraction: float, taylor_quinney: float = 0.9
) -> HeatPartition:
    """Split heat input into a volumetric part and a surface-flux part."""
    if not 0.0 <= volumetric_fraction <= 1.0:
        raise ValueError(
            f"volumetric_fraction must lie in [0, 1], got {volumetric_fraction}"
        )
    _warn_taylor_quinney(taylor_quinney)
    q_v = volumetric_fraction * total_w
    q_s = (1.0 - volumetric_fraction) * total_w
    return HeatPartition(total_w, volumetric_fraction, q_v, q_s, taylor_quinney)


def plastic_dissipation_density(
    effective_stress: float, effective_strain_rate: float, taylor_quinney: float
) -> float:
    """Volumetric heating rate (W/m^3) from plastic work, scalar effective form."""
    if effective_stress < 0.0 or effective_strain_rate < 0.0:
        raise ValueError("effective stress and strain rate must be >= 0")
    _warn_taylor_quinney(taylor_quinney)
    return taylor_quinney * effective_stress * effective_strain_rate


def _warn_taylor_quinney(beta: float) -> None:
    # typical metals fall in [0.8, 0.99]; outside is suspicious but not fatal
    if not 0.8 <= beta <= 0.99:
        warnings.warn(
            f"Taylor-Quinney coefficient {beta} outside the typical range [0.8, 0.99]",
            stacklevel=3,
        )
