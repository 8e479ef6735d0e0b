"""Command-line interface: heatgen, simulate, flow and calibrate subcommands.

Exit status: 0 success, 1 usage error, 2 configuration error, 3 runtime or
simulation error. All diagnostics go to stderr; result tables to stdout and
files. Outputs are deterministic for a given config (and --seed, accepted
for interface stability; no pipeline currently draws random numbers).
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import report
from .calibrate import CalibrationProblem, TargetTrace, calibrate, objective
from .config import ConfigError, RunConfig, parse_config
from .core import GapConductance
from .flow import advect_tracers
from .gridio import (
    read_trace_csv,
    write_csv,
    write_ledger_csv,
    write_polylines_csv,
    write_structured_grid_ascii,
    write_trace_csv,
)
from .heatgen import (
    net_heat_input,
    power_from_torque,
    surface_heat_breakdown,
    total_heat_mixed,
    total_heat_sliding,
    total_heat_sticking,
)

log = logging.getLogger("fswsim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit status 1
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="fswsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="{heatgen,simulate,flow,calibrate}")
    for name, helptext in (
        ("heatgen", "print and write the analytical heat-generation breakdown"),
        ("simulate", "run the transient weld simulation"),
        ("flow", "advect flow tracers and export streamlines"),
        ("calibrate", "fit free parameters to thermocouple targets"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="path to the run configuration")
        p.add_argument("--out", default=None, help="output directory (default from config)")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (reproducibility)")
        p.add_argument("--verbose", action="store_true", help="log progress to stderr")
        p.add_argument(
            "--no-plots", action="store_true", help="skip rendering PNG figures"
        )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
    except UsageError as exc:
        print(parser.format_usage(), file=sys.stderr, end="")
        print(f"fswsim: error: {exc}", file=sys.stderr)
        return 1

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"fswsim: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"fswsim: config error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out if args.out is not None else cfg.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        command = {
            "heatgen": cmd_heatgen,
            "simulate": cmd_simulate,
            "flow": cmd_flow,
            "calibrate": cmd_calibrate,
        }[args.command]
        return command(cfg, out_dir, plots=not args.no_plots)
    except ConfigError as exc:
        print(f"fswsim: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"fswsim: error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


# --- subcommands -------------------------------------------------------------

def cmd_heatgen(cfg: RunConfig, out_dir: Path, plots: bool) -> int:
    tool, process, contact = cfg.tool, cfg.process, cfg.contact
    t_ref = cfg.contact_reference_temperature
    sigma_y = float(cfg.material.yield_strength(t_ref))
    tau = (
        contact.slip_factor * sigma_y / math.sqrt(3.0)
        + (1.0 - contact.slip_factor) * contact.friction_coefficient * contact.contact_pressure
    )
    breakdown = surface_heat_breakdown(tool, process.omega, tau)
    q_stick = total_heat_sticking(tool, process.omega, sigma_y)
    q_slide = total_heat_sliding(
        tool, process.omega, contact.friction_coefficient, contact.contact_pressure
    )
    q_mixed = total_heat_mixed(
        tool, process.omega, contact.slip_factor, sigma_y,
        contact.friction_coefficient, contact.contact_pressure,
    )

    rows: list[tuple[str, float | str]] = [
        ("shoulder_W", breakdown.shoulder_w),
        ("probe_side_W", breakdown.probe_side_w),
        ("probe_tip_W", breakdown.probe_tip_w),
        ("total_W", breakdown.total_w),
        ("f_shoulder", breakdown.f_shoulder),
        ("f_probe_side", breakdown.f_probe_side),
        ("f_probe_tip", breakdown.f_probe_tip),
        ("sticking_total_W", q_stick),
        ("sliding_total_W", q_slide),
        ("mixed_total_W", q_mixed),
        ("sigma_yield_at_reference_Pa", sigma_y),
        ("reference_temperature_K", t_ref),
        ("contact_pressure_Pa", contact.contact_pressure),
    ]
    totals = {"mixed": q_mixed}
    if process.torque is not None:
        power = power_from_torque(
            process.torque,
            process.omega,
            process.traverse_force or 0.0,
            process.traverse_speed,
            include_traverse=False,
        )
        rows += [
            ("torque_power_W", power.total_w),
            ("traverse_power_W", power.traverse_w),
            ("traverse_share", power.traverse_share),
            ("torque_heat_input_W", net_heat_input(power.total_w, process.efficiency)),
        ]
        totals["torque"] = power.total_w

    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        text = f"{value:.6g}" if isinstance(value, float) else str(value)
        print(f"{name:<{width}}  {text}")
    write_csv(out_dir / "heatgen_breakdown.csv", ["quantity", "value"], rows)
    if plots:
        report.render_heatgen(breakdown, totals, out_dir / "heatgen_breakdown.png")
    log.info("heatgen results in %s", out_dir)
    return 0


def _build_model(cfg: RunConfig, spacing=None):
    from .solver import WeldThermalModel

    return WeldThermalModel(
        tool=cfg.tool,
        workpiece=cfg.workpiece,
        material=cfg.material,
        contact=cfg.contact,
        process=cfg.process,
        schedule=cfg.schedule,
        settings=cfg.settings,
        spacing=spacing or cfg.spacing,
        probes=cfg.probes,
        tool_start_x=cfg.tool_start_x,
        heat_model=cfg.heat_model,
        yield_model=cfg.yield_model,
        jc_params=cfg.jc_params,
        jc_strain=cfg.jc_strain,
        jc_strain_rate=cfg.jc_strain_rate,
    )


def cmd_simulate(cfg: RunConfig, out_dir: Path, plots: bool) -> int:
    model = _build_model(cfg)
    spacing = model.field.spacing

    def snapshot_sink(step_index: int, time: float, field) -> None:
        path = out_dir / f"snapshot_{step_index:06d}.vtk"
        write_structured_grid_ascii(
            path, field.T, spacing, title=f"t = {time:.6g} s"
        )

    history = model.run(
        snapshot_every=cfg.snapshot_every,
        snapshot_sink=snapshot_sink if cfg.snapshot_every else None,
    )
    write_trace_csv(out_dir / "probe_traces.csv", history.times, history.probe_traces)
    write_structured_grid_ascii(
        out_dir / "peak_temperature.vtk", history.peak_field, spacing,
        title="all-time peak temperature",
    )
    write_ledger_csv(
        out_dir / "energy_ledger.csv", history.phase_ledgers + [history.ledger]
    )
    if plots:
        report.render_traces(
            history.times, history.probe_traces, out_dir / "probe_traces.png"
        )
        report.render_peak_map(
            history.peak_field, spacing, out_dir / "peak_temperature.png"
        )
    print(f"steps            {history.steps}")
    print(f"peak_K           {history.peak_temperature:.6g}")
    print(f"ledger_closure   {history.ledger.closure_rel:.3e}")
    log.info("simulation results in %s", out_dir)
    return 0


def cmd_flow(cfg: RunConfig, out_dir: Path, plots: bool) -> int:
    flow_cfg = cfg.flow
    angles = np.linspace(0.0, 2.0 * np.pi, flow_cfg.tracer_count, endpoint=False)
    seeds = [
        (flow_cfg.tracer_radius * math.cos(a), flow_cfg.tracer_radius * math.sin(a),
         flow_cfg.seed_depth)
        for a in angles
    ]
    bounds = None
    if flow_cfg.max_distance is not None:
        m = flow_cfg.max_distance
        bounds = ((-m, m), (-m, m), (-m, m))
    paths = advect_tracers(seeds, flow_cfg.field, flow_cfg.duration, flow_cfg.dt, bounds)
    write_polylines_csv(out_dir / "streamlines.csv", paths)
    if plots:
        report.render_streamlines(paths, flow_cfg.field, out_dir / "streamlines.png")
    for tp in paths:
        print(f"tracer {tp.tracer_id}: {len(tp.points)} points, {tp.status}")
    log.info("flow results in %s", out_dir)
    return 0


def cmd_calibrate(cfg: RunConfig, out_dir: Path, plots: bool) -> int:
    cal = cfg.calibration
    if cal is None:
        raise ConfigError("calibrate needs a [calibration] section in the config")
    times, measured = read_trace_csv(cal.targets_path)
    targets = []
    for probe, temps in measured.items():
        if probe not in cfg.probes:
            raise ConfigError(
                f"target column {probe!r} has no matching probe in [probes]"
            )
        targets.append(
            TargetTrace(probe, times, temps, weight=cal.weights.get(probe, 1.0))
        )

    def forward(params: dict[str, float]):
        run_cfg = _apply_parameters(cfg, params)
        model = _build_model(run_cfg, spacing=cal.coarse_spacing)
        history = model.run()
        return {
            name: (history.times, history.probe_traces[name])
            for name in history.probe_traces
        }

    problem = CalibrationProblem(list(cal.parameters), targets, forward)
    result = calibrate(problem, cal.max_evaluations, cal.tolerance)

    lines = [
        "calibration report",
        "==================",
        f"converged        {result.converged}",
        f"evaluations      {result.evaluations}",
        f"objective        {result.objective:.8g}",
        f"simplex_spread   {result.simplex_spread:.8g}",
    ]
    for name, value in result.parameters.items():
        lines.append(f"{name:<16} {value:.8g}")
    if cal.confirm and cal.coarse_spacing is not None:
        fine_problem = CalibrationProblem(
            list(cal.parameters),
            targets,
            lambda params: _fine_forward(cfg, params),
        )
        confirm_value = objective(fine_problem, result.parameters)
        lines.append(f"fine_grid_objective {confirm_value:.8g}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    (out_dir / "calibration_report.txt").write_text(text)
    write_csv(
        out_dir / "calibration_convergence.csv",
        ["evaluation", "best_objective"],
        result.history,
    )
    if plots:
        report.render_convergence(result.history, out_dir / "calibration_convergence.png")
    log.info("calibration results in %s", out_dir)
    return 0


def _fine_forward(cfg: RunConfig, params: dict[str, float]):
    run_cfg = _apply_parameters(cfg, params)
    model = _build_model(run_cfg)
    history = model.run()
    return {name: (history.times, history.probe_traces[name]) for name in history.probe_traces}


def _apply_parameters(cfg: RunConfig, params: dict[str, float]) -> RunConfig:
    """Return a copy of the run config with free calibration parameters applied."""
    contact = cfg.contact
    process = cfg.process
    settings = cfg.settings
    if "slip_factor" in params:
        contact = replace(contact, slip_factor=params["slip_factor"])
    if "friction" in params:
        contact = replace(contact, friction_coefficient=params["friction"])
    if "efficiency" in params:
        process = replace(process, efficiency=params["efficiency"])
    if "h_gap" in params:
        if not isinstance(settings.bottom, GapConductance):
            raise ConfigError(
                "calibrating h_gap requires 'bottom = gap ...' in the config"
            )
        settings = replace(settings, bottom=GapConductance(params["h_gap"]))
    return replace(cfg, contact=contact, process=process, settings=settings)
