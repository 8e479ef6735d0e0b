"""Constitutive laws and temperature-dependent thermophysical properties.

Two hot flow-stress models are provided: the Sellars-Tegart hyperbolic-sine
law driven by the Zener-Hollomon temperature-compensated strain rate, and the
Johnson-Cook yield law. Thermophysical data (conductivity, specific heat,
yield strength vs temperature) lives in piecewise-linear tables that clamp to
their end values outside the tabulated range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .heatgen import SQRT3

GAS_CONSTANT = 8.314462618  # J/(mol K)


@dataclass(frozen=True)
class SellarsTegartParams:
    """Parameters of the hyperbolic-sine hot-deformation law.

    ``structure_factor`` (1/s), ``stress_multiplier`` (1/Pa) and
    ``stress_exponent`` are the material constants of
    Z = A * sinh(alpha * sigma)^n; ``activation_energy`` is the effective
    activation energy in J/mol.
    """

    structure_factor: float
    stress_multiplier: float
    stress_exponent: float
    activation_energy: float
    gas_constant: float = GAS_CONSTANT

    def __post_init__(self) -> None:
        for name in ("structure_factor", "stress_multiplier", "stress_exponent",
                     "activation_energy"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class JohnsonCookParams:
    """Johnson-Cook yield parameters (stresses in Pa, temperatures in K)."""

    a: float
    b: float
    c: float
    n: float
    m: float
    t_melt: float
    t_ref: float
    eps_dot_ref: float = 1.0

    def __post_init__(self) -> None:
        if self.a < 0.0:
            raise ValueError(f"a must be >= 0, got {self.a}")
        if self.t_melt <= self.t_ref:
            raise ValueError(
                f"t_melt ({self.t_melt}) must exceed t_ref ({self.t_ref})"
            )
        if self.eps_dot_ref <= 0.0:
            raise ValueError(f"eps_dot_ref must be > 0, got {self.eps_dot_ref}")


def zener_hollomon(strain_rate: float, temperature: float, params: SellarsTegartParams) -> float:
    """Temperature-compensated strain rate Z = eps_dot * exp(Q / (R T))."""
    if strain_rate <= 0.0:
        raise ValueError(f"strain_rate must be > 0, got {strain_rate}")
    if temperature <= 0.0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    exponent = params.activation_energy / (params.gas_constant * temperature)
    try:
        return strain_rate * math.exp(exponent)
    except OverflowError as exc:
        raise ValueError(
            f"exp overflow in Zener-Hollomon parameter at T={temperature} K "
            f"(exponent {exponent:.1f}); temperature too close to 0"
        ) from exc


def sellars_tegart_flow_stress(
    strain_rate: float, temperature: float, params: SellarsTegartParams
) -> float:
    """Steady-state hot flow stress from the hyperbolic-sine law (Pa)."""
    z = zener_hollomon(strain_rate, temperature, params)
    ratio = (z / params.structure_factor) ** (1.0 / params.stress_exponent)
    return math.asinh(ratio) / params.stress_multiplier


def johnson_cook_yield(
    plastic_strain: float,
    plastic_strain_rate: float,
    temperature: float,
    params: JohnsonCookParams,
) -> float:
    """Johnson-Cook yield stress (Pa), clamped to be non-negative.

    The homologous-temperature factor clamps to 1 below ``t_ref`` and to 0
    above ``t_melt``; the rate factor clamps at 0 where the logarithm would
    drive it negative.
    """
    if plastic_strain < 0.0:
        raise ValueError(f"plastic_strain must be >= 0, got {plastic_strain}")
    if plastic_strain_rate <= 0.0:
        raise ValueError(f"plastic_strain_rate must be > 0, got {plastic_strain_rate}")
    hardening = params.a + params.b * plastic_strain**params.n
    rate = 1.0 + params.c * math.log(plastic_strain_rate / params.eps_dot_ref)
    rate = max(rate, 0.0)
    homologous = (temperature - params.t_ref) / (params.t_melt - params.t_ref)
    homologous = min(max(homologous, 0.0), 1.0)
    thermal = 1.0 - homologous**params.m
    return max(hardening * rate * thermal, 0.0)


def yield_shear_stress(sigma_yield: float) -> float:
    """Von Mises yield shear stress sigma / sqrt(3)."""
    if sigma_yield < 0.0:
        raise ValueError(f"sigma_yield must be >= 0, got {sigma_yield}")
    return sigma_yield / SQRT3


def _validate_table(name: str, table: tuple[tuple[float, float], ...], min_value: float) -> None:
    if len(table) < 2:
        raise ValueError(f"{name} needs at least 2 entries, got {len(table)}")
    temps = [t for t, _ in table]
    if any(b <= a for a, b in zip(temps, temps[1:])):
        raise ValueError(f"{name} temperatures must be strictly increasing")
    if any(v < min_value for _, v in table):
        raise ValueError(f"{name} values must be >= {min_value}")


@dataclass(frozen=True)
class ThermophysicalTable:
    """Density plus k(T), c_p(T) and sigma_yield(T) interpolation tables.

    Density is temperature-independent. Lookups interpolate linearly between
    bracketing knots and clamp to the end values outside the tabulated range.
    Yield strength may reach zero at the hot end (solidus); conductivity and
    specific heat must stay positive.
    """

    density: float
    emissivity: float
    conductivity_table: tuple[tuple[float, float], ...]
    specific_heat_table: tuple[tuple[float, float], ...]
    yield_strength_table: tuple[tuple[float, float], ...]
    name: str = "unnamed"

    def __post_init__(self) -> None:
        if self.density <= 0.0:
            raise ValueError(f"density must be > 0, got {self.density}")
        if not 0.0 <= self.emissivity <= 1.0:
            raise ValueError(f"emissivity must lie in [0, 1], got {self.emissivity}")
        _validate_table("conductivity_table", self.conductivity_table, min_value=1e-300)
        _validate_table("specific_heat_table", self.specific_heat_table, min_value=1e-300)
        _validate_table("yield_strength_table", self.yield_strength_table, min_value=0.0)
        for attr, table in (
            ("_k_t", self.conductivity_table),
            ("_cp_t", self.specific_heat_table),
            ("_sy_t", self.yield_strength_table),
        ):
            arr = np.asarray(table, dtype=float)
            object.__setattr__(self, attr, (arr[:, 0], arr[:, 1]))

    def conductivity(self, temperature):
        """Thermal conductivity (W/(m K)); scalar or array temperature."""
        knots, values = self._k_t
        return np.interp(temperature, knots, values)

    def specific_heat(self, temperature):
        """Specific heat capacity (J/(kg K)); scalar or array temperature."""
        knots, values = self._cp_t
        return np.interp(temperature, knots, values)

    def yield_strength(self, temperature):
        """Yield strength (Pa); scalar or array temperature."""
        knots, values = self._sy_t
        return np.interp(temperature, knots, values)

    def lookup(self, which: str, temperature):
        """Generic property lookup: which in {'k', 'cp', 'sigma_yield'}."""
        try:
            fn = {
                "k": self.conductivity,
                "cp": self.specific_heat,
                "sigma_yield": self.yield_strength,
            }[which]
        except KeyError:
            raise ValueError(f"unknown property {which!r}") from None
        return fn(temperature)

    def max_diffusivity(self) -> float:
        """Largest k/(rho c_p) reachable anywhere in the tabulated range."""
        knots = np.unique(np.concatenate([self._k_t[0], self._cp_t[0]]))
        kappa = self.conductivity(knots) / (self.density * self.specific_heat(knots))
        return float(np.max(kappa))
