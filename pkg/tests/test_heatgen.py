import math

import numpy as np
import pytest

from fswsim import (
    ToolGeometry,
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
from fswsim.heatgen import flat_shoulder_total

from oracles import integrate_tool_heat

OMEGA_400RPM = 400.0 * 2.0 * math.pi / 60.0


def random_tool(rng) -> ToolGeometry:
    shoulder = rng.uniform(4e-3, 15e-3)
    probe = rng.uniform(0.15, 0.85) * shoulder
    height = rng.uniform(1e-3, 8e-3)
    angle = rng.uniform(0.0, math.radians(30.0))
    return ToolGeometry(shoulder, probe, height, angle)


class TestSlipFactor:
    def test_sliding(self):
        assert slip_factor(0.0, 0.5) == 0.0

    def test_sticking(self):
        assert slip_factor(0.37, 0.37) == 1.0

    def test_angular_ratio(self):
        # same result whether built from linear or angular speeds at one radius
        assert slip_factor(20.0, 40.0) == 0.5
        r = 7e-3
        assert slip_factor(20.0 * r, 40.0 * r) == pytest.approx(0.5)

    def test_zero_tool_speed_rejected(self):
        with pytest.raises(ValueError):
            slip_factor(0.0, 0.0)

    def test_overspeed_rejected(self):
        with pytest.raises(ValueError):
            slip_factor(1.1, 1.0)


class TestSurfaceHeatBreakdown:
    def test_zero_rotation(self, reference_tool):
        bd = surface_heat_breakdown(reference_tool, 0.0, 11.547e6)
        assert bd.total_w == 0.0
        assert bd.shoulder_w == bd.probe_side_w == bd.probe_tip_w == 0.0

    def test_reference_total(self, reference_tool):
        # 400 rpm at tau = 11.547 MPa on the 9/3/4 mm, 10 degree tool
        bd = surface_heat_breakdown(reference_tool, OMEGA_400RPM, 11.547e6)
        assert bd.total_w == pytest.approx(973.3, rel=2e-3)

    def test_matches_numeric_integration(self, reference_tool):
        bd = surface_heat_breakdown(reference_tool, OMEGA_400RPM, 11.547e6)
        q1, q2, q3, total = integrate_tool_heat(
            9e-3, 3e-3, 4e-3, math.radians(10.0), OMEGA_400RPM, 11.547e6
        )
        assert bd.shoulder_w == pytest.approx(q1, rel=1e-3)
        assert bd.probe_side_w == pytest.approx(q2, rel=1e-3)
        assert bd.probe_tip_w == pytest.approx(q3, rel=1e-3)
        assert bd.total_w == pytest.approx(total, rel=1e-3)

    def test_oracle_agreement_randomized(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            tool = random_tool(rng)
            omega = rng.uniform(10.0, 300.0)
            tau = rng.uniform(1e6, 6e7)
            bd = surface_heat_breakdown(tool, omega, tau)
            _, _, _, total = integrate_tool_heat(
                tool.shoulder_radius, tool.probe_radius, tool.probe_height,
                tool.cone_angle, omega, tau,
            )
            assert abs(bd.total_w - total) / total < 1e-3

    def test_flat_shoulder_reduction(self):
        tool = ToolGeometry(9e-3, 3e-3, 4e-3, cone_angle=0.0)
        bd = surface_heat_breakdown(tool, OMEGA_400RPM, 2.5e7)
        expected = (2.0 / 3.0) * math.pi * OMEGA_400RPM * 2.5e7 * (
            (9e-3) ** 3 + 3.0 * (3e-3) ** 2 * 4e-3
        )
        assert bd.total_w == pytest.approx(expected, rel=1e-14)
        assert flat_shoulder_total(tool, OMEGA_400RPM, 2.5e7) == pytest.approx(
            bd.total_w, rel=1e-13
        )

    def test_flat_form_rejects_conical(self, reference_tool):
        with pytest.raises(ValueError):
            flat_shoulder_total(reference_tool, 1.0, 1.0)

    def test_linear_in_omega(self, reference_tool):
        base = surface_heat_breakdown(reference_tool, 10.0, 1e7).total_w
        assert surface_heat_breakdown(reference_tool, 30.0, 1e7).total_w == pytest.approx(
            3.0 * base
        )


class TestHeatFractions:
    def test_reference_tool_values(self, reference_tool):
        f_shoulder, f_side, f_tip = heat_fractions(reference_tool)
        assert f_shoulder == pytest.approx(0.86, abs=0.005)
        assert f_side == pytest.approx(0.11, abs=0.005)
        assert f_tip == pytest.approx(0.03, abs=0.005)
        assert f_shoulder + f_side + f_tip == pytest.approx(1.0, abs=1e-12)

    def test_independent_of_omega_and_tau(self, reference_tool):
        for omega, tau in ((1.0, 1.0), (100.0, 5e7), (3.0, 1e4)):
            bd = surface_heat_breakdown(reference_tool, omega, tau)
            assert (bd.f_shoulder, bd.f_probe_side, bd.f_probe_tip) == pytest.approx(
                heat_fractions(reference_tool)
            )

    def test_scale_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            tool = random_tool(rng)
            scale = rng.uniform(0.3, 4.0)
            scaled = ToolGeometry(
                tool.shoulder_radius * scale,
                tool.probe_radius * scale,
                tool.probe_height * scale,
                tool.cone_angle,
            )
            assert heat_fractions(scaled) == pytest.approx(
                heat_fractions(tool), rel=1e-12
            )

    def test_probe_dominates_in_limit(self):
        # shrink the annulus and the side surface away: the tip takes it all
        tool = ToolGeometry(9e-3, 9e-3 * (1.0 - 1e-9), 1e-9, cone_angle=0.0)
        _, _, f_tip = heat_fractions(tool)
        assert f_tip == pytest.approx(1.0, abs=1e-5)

    def test_shoulder_fraction_drops_with_probe_radius(self):
        # wider probes take a growing share from the shoulder
        fractions = [
            heat_fractions(ToolGeometry(9e-3, rp, 4e-3, math.radians(10.0)))
            for rp in np.linspace(1e-3, 8e-3, 8)
        ]
        shoulder = [f[0] for f in fractions]
        probe = [f[1] + f[2] for f in fractions]
        assert all(a > b for a, b in zip(shoulder, shoulder[1:]))
        assert all(a < b for a, b in zip(probe, probe[1:]))


class TestContactConditionTotals:
    def test_sticking_zero_yield(self, reference_tool):
        assert total_heat_sticking(reference_tool, OMEGA_400RPM, 0.0) == 0.0

    def test_sticking_reference(self, reference_tool):
        # sigma_y = 20 MPa -> tau = 11.547 MPa
        q = total_heat_sticking(reference_tool, OMEGA_400RPM, 20e6)
        assert q == pytest.approx(973.3, rel=2e-3)

    def test_sticking_linear_scaling(self, reference_tool):
        base = total_heat_sticking(reference_tool, 10.0, 5e6)
        assert total_heat_sticking(reference_tool, 20.0, 5e6) == pytest.approx(2 * base)
        assert total_heat_sticking(reference_tool, 10.0, 10e6) == pytest.approx(2 * base)

    def test_sliding_zero_friction(self, reference_tool):
        assert total_heat_sliding(reference_tool, OMEGA_400RPM, 0.0, 4e7) == 0.0

    def test_sliding_reference(self, reference_tool):
        # mu p = 0.3 * 40 MPa = 12 MPa
        q = total_heat_sliding(reference_tool, OMEGA_400RPM, 0.3, 40e6)
        assert q == pytest.approx(1011.5, rel=2e-3)

    def test_sliding_doubles_with_pressure(self, reference_tool):
        q1 = total_heat_sliding(reference_tool, OMEGA_400RPM, 0.3, 20e6)
        q2 = total_heat_sliding(reference_tool, OMEGA_400RPM, 0.3, 40e6)
        assert q2 == pytest.approx(2.0 * q1)

    def test_mixed_endpoints_exact(self, reference_tool):
        args = (reference_tool, OMEGA_400RPM)
        q_stick = total_heat_sticking(*args, 20e6)
        q_slide = total_heat_sliding(*args, 0.3, 40e6)
        assert total_heat_mixed(*args, 1.0, 20e6, 0.3, 40e6) == q_stick
        assert total_heat_mixed(*args, 0.0, 20e6, 0.3, 40e6) == q_slide

    def test_mixed_midpoint_is_mean(self, reference_tool):
        args = (reference_tool, OMEGA_400RPM)
        q_stick = total_heat_sticking(*args, 20e6)
        q_slide = total_heat_sliding(*args, 0.3, 40e6)
        q_mid = total_heat_mixed(*args, 0.5, 20e6, 0.3, 40e6)
        assert q_mid == pytest.approx(0.5 * (q_stick + q_slide), rel=1e-14)

    def test_mixed_affine_and_monotone(self, reference_tool):
        rng = np.random.default_rng(3)
        for _ in range(10):
            sigma = rng.uniform(5e6, 5e7)
            mu = rng.uniform(0.1, 0.6)
            p = rng.uniform(1e7, 6e7)
            q0 = total_heat_mixed(reference_tool, OMEGA_400RPM, 0.0, sigma, mu, p)
            q1 = total_heat_mixed(reference_tool, OMEGA_400RPM, 1.0, sigma, mu, p)
            deltas = rng.uniform(0.0, 1.0, size=5)
            for d in deltas:
                q = total_heat_mixed(reference_tool, OMEGA_400RPM, d, sigma, mu, p)
                assert q == pytest.approx(d * q1 + (1 - d) * q0, rel=1e-13)
            if q1 >= q0:
                samples = [
                    total_heat_mixed(reference_tool, OMEGA_400RPM, d, sigma, mu, p)
                    for d in np.linspace(0.0, 1.0, 6)
                ]
                assert all(b >= a for a, b in zip(samples, samples[1:]))

    @pytest.mark.parametrize("bad", [-0.01, 1.01])
    def test_mixed_slip_bounds(self, reference_tool, bad):
        with pytest.raises(ValueError):
            total_heat_mixed(reference_tool, OMEGA_400RPM, bad, 20e6, 0.3, 40e6)


class TestPowerAndPartition:
    def test_power_reference(self):
        result = power_from_torque(40.0, OMEGA_400RPM)
        assert result.total_w == pytest.approx(1675.5, abs=0.1)
        assert result.traverse_w == 0.0

    def test_power_traverse_only(self):
        result = power_from_torque(0.0, 10.0, 2000.0, 5e-3, include_traverse=True)
        assert result.total_w == pytest.approx(10.0)
        assert result.spindle_w == 0.0

    def test_traverse_share_small(self):
        result = power_from_torque(40.0, OMEGA_400RPM, 2000.0, 5e-3, include_traverse=True)
        assert result.traverse_w == pytest.approx(10.0)
        assert result.total_w == pytest.approx(1685.5, abs=0.1)
        assert result.traverse_share == pytest.approx(10.0 / 1685.5, rel=1e-3)
        assert result.traverse_share < 0.01

    def test_heat_input(self):
        assert net_heat_input(1675.5, 1.0) == 1675.5
        assert net_heat_input(1675.5, 0.95) == pytest.approx(1591.7, abs=0.1)
        assert net_heat_input(1675.5, 0.0) == 0.0
        with pytest.raises(ValueError):
            net_heat_input(100.0, 1.2)

    def test_partition(self):
        full_volume = partition_heat(1000.0, 1.0)
        assert full_volume.volumetric_w == 1000.0
        assert full_volume.surface_w == 0.0
        full_surface = partition_heat(1000.0, 0.0)
        assert full_surface.volumetric_w == 0.0
        assert full_surface.surface_w == 1000.0
        half = partition_heat(1000.0, 0.5)
        assert (half.volumetric_w, half.surface_w) == (500.0, 500.0)
        assert half.volumetric_w + half.surface_w == half.total_w

    def test_partition_bounds(self):
        with pytest.raises(ValueError):
            partition_heat(1000.0, 1.5)

    def test_dissipation_density(self):
        assert plastic_dissipation_density(50e6, 0.0, 0.9) == 0.0
        assert plastic_dissipation_density(50e6, 100.0, 0.9) == pytest.approx(4.5e9)
        # beta = 1 bounds every in-range beta from above
        with pytest.warns(UserWarning):
            upper = plastic_dissipation_density(50e6, 100.0, 1.0)
        for beta in (0.8, 0.9, 0.99):
            assert plastic_dissipation_density(50e6, 100.0, beta) <= upper

    def test_dissipation_warns_outside_typical_range(self):
        with pytest.warns(UserWarning):
            plastic_dissipation_density(1e6, 1.0, 0.5)
