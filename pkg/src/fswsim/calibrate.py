"""Inverse estimation of contact and loss parameters from thermocouple traces.

A derivative-free simplex search (reflection / expansion / contraction /
shrink) minimizes the weighted sum of squared temperature residuals between
simulated probe traces and measured (or synthetic) target series. The search
runs in coordinates normalized to each parameter's bounds, optionally on a
log scale for parameters spanning decades (the gap conductance does), and
every candidate is clipped to the bounds, so reported values respect them
exactly. The initial simplex is fixed (box center plus 10%-of-range steps
per axis), which makes a calibration fully deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DEFAULT_BOUNDS: dict[str, tuple[float, float, bool]] = {
    # name: (lower, upper, log_scale)
    "slip_factor": (0.0, 1.0, False),
    "friction": (0.05, 1.0, False),
    "efficiency": (0.9, 1.0, False),
    "h_gap": (10.0, 1e5, True),
}


@dataclass(frozen=True)
class ParameterSpec:
    """One free parameter with finite bounds; log-scaled search if flagged."""

    name: str
    lower: float
    upper: float
    log_scale: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError(f"bounds for {self.name} must be finite")
        if not self.lower < self.upper:
            raise ValueError(
                f"lower bound must be below upper for {self.name}: "
                f"[{self.lower}, {self.upper}]"
            )
        if self.log_scale and self.lower <= 0.0:
            raise ValueError(f"log-scaled parameter {self.name} needs a positive lower bound")

    @classmethod
    def default(cls, name: str) -> "ParameterSpec":
        if name not in DEFAULT_BOUNDS:
            raise ValueError(
                f"no default bounds for {name!r}; known: {sorted(DEFAULT_BOUNDS)}"
            )
        lo, hi, log_scale = DEFAULT_BOUNDS[name]
        return cls(name, lo, hi, log_scale)

    def to_unit(self, value: float) -> float:
        if self.log_scale:
            return (math.log10(value) - math.log10(self.lower)) / (
                math.log10(self.upper) - math.log10(self.lower)
            )
        return (value - self.lower) / (self.upper - self.lower)

    def from_unit(self, u: float) -> float:
        u = min(max(u, 0.0), 1.0)
        if self.log_scale:
            lo, hi = math.log10(self.lower), math.log10(self.upper)
            return 10.0 ** (lo + u * (hi - lo))
        return self.lower + u * (self.upper - self.lower)


@dataclass(frozen=True)
class TargetTrace:
    """Measured probe series to fit: times must be sorted ascending."""

    probe: str
    times: np.ndarray
    temperatures: np.ndarray
    weight: float = 1.0

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        temps = np.asarray(self.temperatures, dtype=float)
        if times.ndim != 1 or times.shape != temps.shape:
            raise ValueError(f"target {self.probe!r}: times/temperatures shape mismatch")
        if times.size < 1:
            raise ValueError(f"target {self.probe!r} is empty")
        if (np.diff(times) <= 0.0).any():
            raise ValueError(f"target {self.probe!r}: times must be strictly increasing")
        if self.weight <= 0.0:
            raise ValueError(f"target {self.probe!r}: weight must be > 0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "temperatures", temps)


ForwardModel = Callable[[dict[str, float]], dict[str, tuple[np.ndarray, np.ndarray]]]


@dataclass
class CalibrationProblem:
    """Free parameters, target traces and the forward model that links them.

    ``forward`` maps a parameter dict to simulated traces, one
    ``(times, temperatures)`` pair per probe name appearing in the targets.
    """

    parameters: list[ParameterSpec]
    targets: list[TargetTrace]
    forward: ForwardModel

    def __post_init__(self) -> None:
        if not self.parameters:
            raise ValueError("at least one free parameter is required")
        names = [p.name for p in self.parameters]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in {names}")
        if not self.targets:
            raise ValueError("at least one target trace is required")


def objective(problem: CalibrationProblem, params: dict[str, float]) -> float:
    """Weighted sum of squared residuals against the targets.

    Simulated traces are interpolated to the target timestamps.
    """
    for spec in problem.parameters:
        value = params[spec.name]
        if not spec.lower <= value <= spec.upper:
            raise ValueError(
                f"{spec.name}={value} outside bounds [{spec.lower}, {spec.upper}]"
            )
    try:
        simulated = problem.forward(params)
    except Exception as exc:
        raise RuntimeError(f"forward model failed at {params}: {exc}") from exc

    total = 0.0
    for target in problem.targets:
        if target.probe not in simulated:
            raise RuntimeError(f"forward model returned no trace for probe {target.probe!r}")
        sim_t, sim_T = simulated[target.probe]
        predicted = np.interp(target.times, sim_t, sim_T)
        residual = predicted - target.temperatures
        total += target.weight * float(np.dot(residual, residual))
    return total


@dataclass
class CalibrationResult:
    """Best parameters and the convergence record of a simplex search."""

    parameters: dict[str, float]
    objective: float
    evaluations: int
    converged: bool
    simplex_spread: float
    history: list[tuple[int, float]] = field(default_factory=list)


def calibrate(
    problem: CalibrationProblem,
    max_evaluations: int = 200,
    tolerance: float = 1e-6,
) -> CalibrationResult:
    """Bounded Nelder-Mead descent over the problem's parameters.

    Terminates when the simplex objective spread drops below
    ``tolerance * (1 + best)`` or the evaluation budget runs out; in the
    latter case the best point so far is returned with ``converged=False``.
    """
    specs = problem.parameters
    dim = len(specs)
    evaluations = 0
    history: list[tuple[int, float]] = []

    def clip(u: np.ndarray) -> np.ndarray:
        return np.clip(u, 0.0, 1.0)

    def params_of(u: np.ndarray) -> dict[str, float]:
        return {spec.name: spec.from_unit(float(ui)) for spec, ui in zip(specs, u)}

    best_so_far = [math.inf]

    def evaluate(u: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        value = objective(problem, params_of(u))
        if value < best_so_far[0]:
            best_so_far[0] = value
        history.append((evaluations, best_so_far[0]))
        return value

    # initial simplex: box center plus a 10%-of-range step per axis
    simplex = [clip(np.full(dim, 0.5))]
    for axis in range(dim):
        vertex = np.full(dim, 0.5)
        vertex[axis] += 0.1
        simplex.append(clip(vertex))
    values = [evaluate(u) for u in simplex]

    alpha, gamma_e, rho, sigma = 1.0, 2.0, 0.5, 0.5
    converged = False

    while evaluations < max_evaluations:
        order = np.argsort(values)
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        spread = values[-1] - values[0]
        if spread < tolerance * (1.0 + abs(values[0])):
            converged = True
            break

        centroid = np.mean(simplex[:-1], axis=0)
        reflected = clip(centroid + alpha * (centroid - simplex[-1]))
        f_reflected = evaluate(reflected)
        if values[0] <= f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[0]:
            expanded = clip(centroid + gamma_e * (reflected - centroid))
            if evaluations >= max_evaluations:
                simplex[-1], values[-1] = reflected, f_reflected
                break
            f_expanded = evaluate(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
            continue
        contracted = clip(centroid + rho * (simplex[-1] - centroid))
        if evaluations >= max_evaluations:
            break
        f_contracted = evaluate(contracted)
        if f_contracted < values[-1]:
            simplex[-1], values[-1] = contracted, f_contracted
            continue
        # shrink toward the best vertex; never move a vertex we cannot re-evaluate
        for i in range(1, len(simplex)):
            if evaluations >= max_evaluations:
                break
            simplex[i] = clip(simplex[0] + sigma * (simplex[i] - simplex[0]))
            values[i] = evaluate(simplex[i])

    order = np.argsort(values)
    best_u = simplex[int(order[0])]
    best_value = values[int(order[0])]
    spread = values[int(order[-1])] - best_value
    return CalibrationResult(
        parameters=params_of(best_u),
        objective=float(best_value),
        evaluations=evaluations,
        converged=converged,
        simplex_spread=float(spread),
        history=history,
    )
