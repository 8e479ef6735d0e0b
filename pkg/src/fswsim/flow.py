"""Kinematic surrogate of the material flow around the weld probe.

Three incompressible building blocks are superposed: a rigid-body rotation
whose angular rate tapers linearly to zero across the shear zone, a uniform
translation along the weld, and an axisymmetric ring vortex (Rankine core)
circulating in the r-z plane around a ring encircling the probe. The
rotation is solenoidal for any radial rate profile and the vortex is built
from a Stokes streamfunction, so the composed field is divergence-free by
construction. Tracer particles are advected through the field with the
classical fourth-order Runge-Kutta scheme to draw streaklines.

Coordinates: the probe axis is z through the origin, x the weld direction;
points inside the probe cylinder are outside the model's domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class FlowDomainError(ValueError):
    """Point inside the probe cylinder, where the flow field is undefined."""


@dataclass(frozen=True)
class FlowField:
    """Composed rotation + translation + ring-vortex velocity field."""

    probe_radius: float
    shear_zone_radius: float
    rotation_rate: float
    traverse_speed: float = 0.0
    circulation: float = 0.0
    core_radius: float = 1e-3
    ring_radius: float | None = None

    def __post_init__(self) -> None:
        if self.probe_radius <= 0.0:
            raise ValueError(f"probe_radius must be > 0, got {self.probe_radius}")
        if self.shear_zone_radius < self.probe_radius:
            raise ValueError(
                f"shear_zone_radius {self.shear_zone_radius} must be >= probe_radius "
                f"{self.probe_radius}"
            )
        if self.core_radius <= 0.0:
            raise ValueError(f"core_radius must be > 0, got {self.core_radius}")
        if self.ring_radius is None:
            object.__setattr__(
                self, "ring_radius", 0.5 * (self.probe_radius + self.shear_zone_radius)
            )
        if not self.probe_radius < self.ring_radius <= self.shear_zone_radius:
            raise ValueError(
                f"ring_radius {self.ring_radius} must lie in "
                f"({self.probe_radius}, {self.shear_zone_radius}]"
            )

    def angular_rate(self, r):
        """Rotation rate profile: full rate at the probe wall, zero beyond the shear zone."""
        r = np.asarray(r, dtype=float)
        span = self.shear_zone_radius - self.probe_radius
        if span == 0.0:
            return np.where(r <= self.probe_radius, self.rotation_rate, 0.0)
        taper = (self.shear_zone_radius - r) / span
        return self.rotation_rate * np.clip(taper, 0.0, 1.0)

    def _vortex_speed_and_potential(self, s):
        """Rankine swirl speed u(s) and its radial integral G(s) = int_0^s u."""
        gamma = self.circulation
        a = self.core_radius
        u_core = gamma * s / (2.0 * math.pi * a**2)
        u_out = np.divide(gamma, 2.0 * math.pi * s, out=np.zeros_like(s), where=s > 0.0)
        u = np.where(s < a, u_core, u_out)
        g_core = gamma * s**2 / (4.0 * math.pi * a**2)
        log_arg = np.where(s > 0.0, s / a, 1.0)
        g_out = gamma / (4.0 * math.pi) + gamma * np.log(log_arg) / (2.0 * math.pi)
        g = np.where(s < a, g_core, g_out)
        return u, g


def velocity_at(points, field: FlowField) -> np.ndarray:
    """Flow velocity at one point or an (N, 3) array of points (m/s).

    Raises FlowDomainError for any point strictly inside the probe cylinder.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != 3:
        raise ValueError(f"points must have 3 components, got shape {pts.shape}")
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    r = np.hypot(x, y)
    if (r < field.probe_radius * (1.0 - 1e-12)).any():
        raise FlowDomainError(
            f"point at r={float(r.min()):.6g} inside the probe cylinder "
            f"(radius {field.probe_radius})"
        )

    v = np.zeros_like(pts)
    omega = field.angular_rate(r)
    v[:, 0] = -omega * y
    v[:, 1] = omega * x
    v[:, 0] += field.traverse_speed

    if field.circulation != 0.0:
        s = np.hypot(r - field.ring_radius, z)
        u, g = field._vortex_speed_and_potential(s)
        inv_s = np.divide(1.0, s, out=np.zeros_like(s), where=s > 0.0)
        v_r = -u * z * inv_s
        v_z = u * (r - field.ring_radius) * inv_s + g / r
        v[:, 0] += v_r * x / r
        v[:, 1] += v_r * y / r
        v[:, 2] += v_z

    return v[0] if np.asarray(points).ndim == 1 else v


def divergence_at(point, field: FlowField, h: float = 1e-6) -> float:
    """Central-difference divergence of the composed field at a point (1/s)."""
    point = np.asarray(point, dtype=float)
    div = 0.0
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = h
        vp = velocity_at(point + e, field)[axis]
        vm = velocity_at(point - e, field)[axis]
        div += (vp - vm) / (2.0 * h)
    return float(div)


@dataclass
class TracerPath:
    """One advected tracer: its polyline and how the trace ended."""

    tracer_id: int
    points: np.ndarray  # (n, 3)
    status: str  # completed | exited | seed_rejected | entered_probe

    @property
    def exited(self) -> bool:
        return self.status == "exited"


def advect_tracers(
    seeds,
    field: FlowField,
    t_end: float,
    dt: float,
    bounds: tuple[tuple[float, float], ...] | None = None,
) -> list[TracerPath]:
    """Trace particles through the flow with fourth-order Runge-Kutta steps.

    ``bounds`` is an optional ((xmin, xmax), (ymin, ymax), (zmin, zmax)) box;
    a tracer leaving it (or entering the probe cylinder) has its polyline
    truncated and flagged. A seed inside the probe is rejected per-seed and
    the remaining tracers still run.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t_end <= 0.0:
        raise ValueError(f"t_end must be > 0, got {t_end}")

    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(t_end, dt) or n_steps == 0:
        n_steps = int(math.ceil(t_end / dt))

    def inside_bounds(p) -> bool:
        if bounds is None:
            return True
        return all(lo <= c <= hi for c, (lo, hi) in zip(p, bounds))

    paths: list[TracerPath] = []
    for tid, seed in enumerate(seeds):
        seed = np.asarray(seed, dtype=float)
        try:
            velocity_at(seed, field)
        except FlowDomainError:
            paths.append(TracerPath(tid, seed[None, :].copy(), "seed_rejected"))
            continue
        pts = [seed.copy()]
        status = "completed"
        x = seed.copy()
        remaining = t_end
        for _ in range(n_steps):
            h = min(dt, remaining)
            try:
                k1 = velocity_at(x, field)
                k2 = velocity_at(x + 0.5 * h * k1, field)
                k3 = velocity_at(x + 0.5 * h * k2, field)
                k4 = velocity_at(x + h * k3, field)
                x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            except FlowDomainError:
                status = "entered_probe"
                break
            remaining -= h
            if np.hypot(x[0], x[1]) < field.probe_radius:
                status = "entered_probe"
                break
            if not inside_bounds(x):
                pts.append(x.copy())
                status = "exited"
                break
            pts.append(x.copy())
            if remaining <= 0.0:
                break
        paths.append(TracerPath(tid, np.asarray(pts), status))
    return paths
