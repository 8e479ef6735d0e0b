import math

import numpy as np
import pytest

from fswsim import (
    JohnsonCookParams,
    SellarsTegartParams,
    ThermophysicalTable,
    johnson_cook_yield,
    sellars_tegart_flow_stress,
    yield_shear_stress,
    zener_hollomon,
)

ST = SellarsTegartParams(
    structure_factor=1e10,
    stress_multiplier=1.5e-8,
    stress_exponent=5.0,
    activation_energy=156e3,
)

JC = JohnsonCookParams(
    a=276e6, b=430e6, c=0.01, n=0.34, m=1.2, t_melt=855.0, t_ref=293.0, eps_dot_ref=1.0
)


class TestSellarsTegart:
    def test_z_equals_structure_factor_case(self):
        # pick (strain rate, T) so that Z == A: then sinh(alpha sigma) == 1
        T = 700.0
        strain_rate = ST.structure_factor * math.exp(
            -ST.activation_energy / (ST.gas_constant * T)
        )
        z = zener_hollomon(strain_rate, T, ST)
        assert z == pytest.approx(ST.structure_factor, rel=1e-12)
        sigma = sellars_tegart_flow_stress(strain_rate, T, ST)
        assert sigma == pytest.approx(math.asinh(1.0) / ST.stress_multiplier, rel=1e-12)

    def test_vanishing_limit(self):
        # Z / A -> 0 drives the stress to zero from above
        sigma = sellars_tegart_flow_stress(1e-30, 2000.0, ST)
        assert 0.0 < sigma < 1e4

    def test_monotonic_in_temperature(self):
        s1 = sellars_tegart_flow_stress(10.0, 600.0, ST)
        s2 = sellars_tegart_flow_stress(10.0, 800.0, ST)
        assert s1 > s2

    def test_partial_derivative_signs(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            rate = 10.0 ** rng.uniform(-2.0, 3.0)
            T = rng.uniform(500.0, 900.0)
            base = sellars_tegart_flow_stress(rate, T, ST)
            d_rate = sellars_tegart_flow_stress(rate * 1.001, T, ST) - base
            d_temp = sellars_tegart_flow_stress(rate, T + 0.1, ST) - base
            assert d_rate > 0.0
            assert d_temp < 0.0

    def test_overflow_diagnostic(self):
        with pytest.raises(ValueError, match="overflow"):
            sellars_tegart_flow_stress(1.0, 1e-2, ST)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            sellars_tegart_flow_stress(0.0, 700.0, ST)
        with pytest.raises(ValueError):
            sellars_tegart_flow_stress(1.0, -5.0, ST)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            SellarsTegartParams(0.0, 1e-8, 5.0, 156e3)


class TestJohnsonCook:
    def test_reference_state_gives_a(self):
        assert johnson_cook_yield(0.0, JC.eps_dot_ref, JC.t_ref, JC) == JC.a

    def test_melt_gives_zero(self):
        assert johnson_cook_yield(0.1, 1.0, JC.t_melt, JC) == 0.0

    def test_hardening_only(self):
        params = JohnsonCookParams(
            a=100e6, b=50e6, c=0.0, n=1.0, m=1.2, t_melt=855.0, t_ref=293.0
        )
        assert johnson_cook_yield(1.0, 1.0, params.t_ref, params) == pytest.approx(150e6)

    def test_clamps(self):
        # below reference temperature the thermal factor caps at 1
        cold = johnson_cook_yield(0.0, 1.0, 100.0, JC)
        assert cold == pytest.approx(JC.a)
        # above melt it floors at 0
        assert johnson_cook_yield(0.0, 1.0, 2000.0, JC) == 0.0
        # very slow rates clamp the rate bracket at zero, not negative
        assert johnson_cook_yield(0.0, 1e-80, 400.0, JC) == 0.0

    def test_always_nonnegative(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            value = johnson_cook_yield(
                rng.uniform(0.0, 2.0),
                10.0 ** rng.uniform(-6.0, 4.0),
                rng.uniform(50.0, 1500.0),
                JC,
            )
            assert value >= 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            JohnsonCookParams(a=1e6, b=0.0, c=0.0, n=1.0, m=1.0, t_melt=300.0, t_ref=400.0)
        with pytest.raises(ValueError):
            johnson_cook_yield(-0.1, 1.0, 400.0, JC)


class TestYieldShearStress:
    def test_values(self):
        assert yield_shear_stress(0.0) == 0.0
        assert yield_shear_stress(math.sqrt(3.0)) == pytest.approx(1.0)
        assert yield_shear_stress(20e6) == pytest.approx(11.547e6, rel=1e-4)

    def test_round_trip_identity(self):
        rng = np.random.default_rng(2)
        for sigma in rng.uniform(0.0, 1e9, size=20):
            assert yield_shear_stress(sigma * math.sqrt(3.0)) == pytest.approx(
                sigma, rel=1e-12, abs=1e-9
            )


class TestThermophysicalTable:
    def test_exact_at_knots(self, aluminum_like):
        assert aluminum_like.conductivity(473.0) == 177.0
        assert aluminum_like.specific_heat(855.0) == 1130.0
        assert aluminum_like.yield_strength(673.0) == 40e6

    def test_midpoint_interpolation(self, aluminum_like):
        assert aluminum_like.conductivity(383.0) == pytest.approx(0.5 * (167.0 + 177.0))
        assert aluminum_like.yield_strength(333.0) == pytest.approx(0.5 * (276e6 + 250e6))

    def test_clamping(self, aluminum_like):
        assert aluminum_like.conductivity(100.0) == 167.0
        assert aluminum_like.conductivity(2000.0) == 193.0

    def test_continuity_at_knots(self, aluminum_like):
        for knot, _ in aluminum_like.conductivity_table:
            below = aluminum_like.conductivity(knot - 1e-9)
            above = aluminum_like.conductivity(knot + 1e-9)
            assert below == pytest.approx(above, abs=1e-6)

    def test_array_lookup(self, aluminum_like):
        temps = np.array([293.0, 383.0, 473.0])
        values = aluminum_like.conductivity(temps)
        assert values.shape == (3,)
        assert values[0] == 167.0

    def test_generic_lookup(self, aluminum_like):
        assert aluminum_like.lookup("k", 473.0) == 177.0
        assert aluminum_like.lookup("cp", 473.0) == 978.0
        assert aluminum_like.lookup("sigma_yield", 473.0) == 190e6
        with pytest.raises(ValueError):
            aluminum_like.lookup("viscosity", 473.0)

    def test_max_diffusivity(self, constant_material):
        kappa = constant_material.max_diffusivity()
        assert kappa == pytest.approx(160.0 / (2700.0 * 900.0))

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(density=0.0),
            dict(emissivity=1.5),
            dict(conductivity_table=((300.0, 160.0),)),  # single entry
            dict(conductivity_table=((300.0, 160.0), (300.0, 170.0))),  # not increasing
            dict(conductivity_table=((300.0, 160.0), (400.0, -1.0))),  # negative value
        ],
    )
    def test_validation(self, kwargs):
        base = dict(
            density=2700.0,
            emissivity=0.3,
            conductivity_table=((300.0, 160.0), (800.0, 190.0)),
            specific_heat_table=((300.0, 900.0), (800.0, 1100.0)),
            yield_strength_table=((300.0, 2e8), (800.0, 0.0)),
        )
        base.update(kwargs)
        with pytest.raises(ValueError):
            ThermophysicalTable(**base)

    def test_yield_may_reach_zero_at_hot_end(self):
        table = ThermophysicalTable(
            density=2700.0,
            emissivity=0.3,
            conductivity_table=((300.0, 160.0), (800.0, 190.0)),
            specific_heat_table=((300.0, 900.0), (800.0, 1100.0)),
            yield_strength_table=((300.0, 2e8), (855.0, 0.0)),
        )
        assert table.yield_strength(855.0) == 0.0
