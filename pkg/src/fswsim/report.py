"""Figure rendering for the report path; PNG files next to the CSV output."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_heatgen(breakdown, totals: dict[str, float], path) -> None:
    """Bar chart of the per-surface heat split with the fractions annotated."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    labels = ["shoulder", "probe side", "probe tip"]
    powers = [breakdown.shoulder_w, breakdown.probe_side_w, breakdown.probe_tip_w]
    fracs = [breakdown.f_shoulder, breakdown.f_probe_side, breakdown.f_probe_tip]
    bars = ax.bar(labels, powers, color=["#d95f02", "#7570b3", "#1b9e77"])
    for bar, frac in zip(bars, fracs):
        ax.annotate(
            f"{frac:.2f}",
            (bar.get_x() + bar.get_width() / 2.0, bar.get_height()),
            ha="center", va="bottom",
        )
    ax.set_ylabel("heat generation (W)")
    title = " / ".join(f"{k} {v:.0f} W" for k, v in totals.items())
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_traces(times: np.ndarray, traces: dict[str, np.ndarray], path) -> None:
    """Probe temperature histories."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name, values in traces.items():
        ax.plot(times, values, label=name)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("temperature (K)")
    ax.grid(alpha=0.3)
    if traces:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_peak_map(peak_field: np.ndarray, spacing, path) -> None:
    """Top-surface map of the all-time peak temperature."""
    fig, ax = plt.subplots(figsize=(6.5, 3.5))
    top = peak_field[:, :, 0].T  # y vertical, x horizontal
    nx, ny = peak_field.shape[:2]
    extent = (0.0, nx * spacing[0] * 1e3, 0.0, ny * spacing[1] * 1e3)
    im = ax.imshow(top, origin="lower", extent=extent, aspect="equal", cmap="inferno")
    fig.colorbar(im, ax=ax, label="peak temperature (K)")
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_streamlines(paths, flow_field, path) -> None:
    """Top view of the tracer polylines with probe and shear-zone circles."""
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    for tp in paths:
        pts = tp.points
        if len(pts) > 1:
            ax.plot(pts[:, 0] * 1e3, pts[:, 1] * 1e3, lw=0.8)
    theta = np.linspace(0.0, 2.0 * np.pi, 200)
    for radius, style in ((flow_field.probe_radius, "k-"), (flow_field.shear_zone_radius, "k--")):
        ax.plot(radius * 1e3 * np.cos(theta), radius * 1e3 * np.sin(theta), style, lw=1.0)
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_convergence(history, path) -> None:
    """Best objective value against forward-model evaluation count."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if history:
        evals, best = zip(*history)
        ax.semilogy(evals, np.maximum(best, 1e-300), marker=".", lw=0.8)
    ax.set_xlabel("objective evaluations")
    ax.set_ylabel("best objective")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
