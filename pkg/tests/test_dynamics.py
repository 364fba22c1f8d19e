import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from climstress import dynamics
from climstress.errors import DomainError
from climstress.mortality import ExcessMortalityFn


class TestGrossOutput:
    def test_identity_case(self):
        assert dynamics.gross_output(1.0, 1.0, 1.0, 0.3) == 1.0

    def test_scalar_oracle(self):
        # independent evaluation via exp/log
        expected = 2.0 * math.exp(0.3 * math.log(8.0))
        assert dynamics.gross_output(2.0, 8.0, 1.0, 0.3) == pytest.approx(
            expected, rel=1e-14
        )
        assert expected == pytest.approx(3.73213196, rel=1e-8)

    def test_dice_period0(self, reference_frame):
        # 2015 output of the DICE-2016 reference inputs
        got = dynamics.gross_output(5.115, 223.0, 7.403, 0.3)
        assert got == pytest.approx(reference_frame["y_gross"].iloc[0], rel=1e-9)

    def test_domain_errors(self):
        for bad in ((0.0, 1.0, 1.0), (1.0, -2.0, 1.0), (1.0, 1.0, 0.0)):
            with pytest.raises(DomainError):
                dynamics.gross_output(*bad, 0.3)


class TestDamageAbatement:
    def test_no_abatement_no_warming(self):
        assert dynamics.damage_abatement_factor(0.0, 0.0, 0.05, 2.6, 0.00236) == 1.0

    def test_single_term(self):
        got = dynamics.damage_abatement_factor(0.0, 1.0, 0.05, 2.6, 0.00236)
        assert got == pytest.approx(0.99764, rel=0, abs=1e-12)

    def test_scalar_oracle(self):
        got = dynamics.damage_abatement_factor(1.0, 2.5, 0.05, 2.6, 0.00236)
        assert got == pytest.approx(1.0 - 0.05 - 0.00236 * 6.25, abs=1e-15)
        assert got == pytest.approx(0.93525)

    def test_preconditions(self):
        with pytest.raises(DomainError):
            dynamics.damage_abatement_factor(-0.1, 1.0, 0.05, 2.6, 0.00236)
        with pytest.raises(DomainError):
            dynamics.damage_abatement_factor(0.1, 1.0, -0.05, 2.6, 0.00236)

    @given(t_at=st.floats(0, 10), theta1=st.floats(0, 0.2))
    def test_zero_damage_limit(self, t_at, theta1):
        # pi2 = 0, mu = 0 makes the factor exactly one for any temperature
        assert dynamics.damage_abatement_factor(0.0, t_at, theta1, 2.6, 0.0) == 1.0


class TestIndustrialEmissions:
    def test_full_abatement(self):
        assert dynamics.industrial_emissions(1.0, 0.5, 123.0) == 0.0

    def test_arithmetic(self):
        assert dynamics.industrial_emissions(0.0, 0.35, 100.0) == pytest.approx(35.0)
        assert dynamics.industrial_emissions(0.5, 0.35, 100.0) == pytest.approx(17.5)


class TestRadiativeForcing:
    def test_preindustrial_zero(self):
        assert dynamics.radiative_forcing(588.0, 0.0, 3.6813, 588.0) == 0.0

    def test_one_doubling(self):
        got = dynamics.radiative_forcing(1176.0, 0.0, 3.6813, 588.0)
        assert got == pytest.approx(3.6813, rel=1e-12)

    def test_scalar_oracle(self):
        expected = 3.6813 * math.log2(851.0 / 588.0) + 0.5
        got = dynamics.radiative_forcing(851.0, 0.5, 3.6813, 588.0)
        assert got == pytest.approx(expected, rel=1e-14)
        assert got == pytest.approx(2.4634, abs=5e-4)

    def test_domain(self):
        with pytest.raises(DomainError):
            dynamics.radiative_forcing(0.0, 0.0, 3.6813, 588.0)


class TestStepCarbon:
    def test_identity_dynamics(self, params):
        from dataclasses import replace

        ident = replace(params, phi_m=np.eye(3))
        m = np.array([600.0, 400.0, 1700.0])
        np.testing.assert_array_equal(dynamics.step_carbon(m, 0.0, ident), m)

    def test_injection_arithmetic(self, params):
        from dataclasses import replace

        ident = replace(params, phi_m=np.eye(3))
        m = np.array([600.0, 400.0, 1700.0])
        out = dynamics.step_carbon(m, 36.66, ident)
        assert out[0] - m[0] == pytest.approx(50.0, rel=1e-12)

    def test_dice_period1(self, params, reference_frame):
        m0 = reference_frame[["m_at", "m_up", "m_lo"]].iloc[0].to_numpy()
        e0 = reference_frame["e_total"].iloc[0]
        out = dynamics.step_carbon(m0, e0, params)
        m1 = reference_frame[["m_at", "m_up", "m_lo"]].iloc[1].to_numpy()
        np.testing.assert_allclose(out, m1, rtol=1e-9)

    @given(
        m=st.tuples(
            st.floats(1.0, 5000.0), st.floats(1.0, 5000.0), st.floats(1.0, 5000.0)
        )
    )
    @settings(max_examples=200)
    def test_carbon_conservation(self, m, params):
        m = np.array(m)
        out = dynamics.step_carbon(m, 0.0, params)
        assert abs(out.sum() - m.sum()) / m.sum() <= 1e-9

    def test_mass_change_equals_injection(self, params):
        m = np.array([851.0, 460.0, 1740.0])
        e = 40.0
        out = dynamics.step_carbon(m, e, params)
        expected_gain = params.delta_years * e / params.beta_co2
        assert out.sum() - m.sum() == pytest.approx(expected_gain, rel=1e-12)

    def test_domain(self, params):
        with pytest.raises(DomainError):
            dynamics.step_carbon(np.array([-1.0, 400.0, 1700.0]), 0.0, params)


class TestStepTemperature:
    def test_equilibrium(self, params):
        out = dynamics.step_temperature(np.zeros(2), 0.0, params)
        np.testing.assert_array_equal(out, np.zeros(2))

    def test_forcing_coupling(self, params):
        from dataclasses import replace

        ident = replace(params, phi_t=np.eye(2))
        out = dynamics.step_temperature(np.array([1.0, 0.5]), 2.0, ident)
        assert out[0] == pytest.approx(1.0 + 0.1005 * 2.0, rel=1e-14)
        assert out[1] == 0.5

    def test_dice_period1(self, params, reference_frame, dice_exog):
        t0 = reference_frame[["t_at", "t_lo"]].iloc[0].to_numpy()
        m_at_1 = reference_frame["m_at"].iloc[1]
        f1 = dynamics.radiative_forcing(
            m_at_1, dice_exog.f_ex[1], params.eta, params.m_at_preindustrial
        )
        out = dynamics.step_temperature(t0, f1, params)
        t1 = reference_frame[["t_at", "t_lo"]].iloc[1].to_numpy()
        np.testing.assert_allclose(out, t1, rtol=1e-9)

    @given(m_lo=st.floats(600.0, 900.0), m_hi=st.floats(900.1, 2000.0))
    @settings(max_examples=100)
    def test_monotone_in_concentration(self, params, m_lo, m_hi):
        t = np.array([1.0, 0.3])
        f_lo = dynamics.radiative_forcing(m_lo, 0.5, params.eta, 588.0)
        f_hi = dynamics.radiative_forcing(m_hi, 0.5, params.eta, 588.0)
        assert f_hi > f_lo
        out_lo = dynamics.step_temperature(t, f_lo, params)
        out_hi = dynamics.step_temperature(t, f_hi, params)
        assert out_hi[0] > out_lo[0]


class TestStepCapital:
    def test_pure_depreciation(self, params):
        out = dynamics.step_capital(100.0, 50.0, 50.0, params)
        assert out == pytest.approx(100.0 * 0.9**5, rel=1e-14)

    def test_arithmetic_oracle(self, params):
        out = dynamics.step_capital(100.0, 50.0, 40.0, params)
        assert out == pytest.approx(100.0 * 0.9**5 + 5 * 10.0, rel=1e-14)
        assert out == pytest.approx(109.049, abs=1e-12)

    def test_zero_depreciation_identity(self, params):
        from dataclasses import replace

        nodk = replace(params, delta_k=0.0)
        assert dynamics.step_capital(77.0, 5.0, 5.0, nodk) == 77.0

    def test_domain(self, params):
        with pytest.raises(DomainError):
            dynamics.step_capital(100.0, 50.0, 60.0, params)
        with pytest.raises(DomainError):
            dynamics.step_capital(0.0, 50.0, 40.0, params)


class TestStepPopulation:
    def test_no_excess(self):
        out = dynamics.step_population(8.0, 1.002, 0.06, 2.5, lambda t: 0.0 * t)
        assert out == pytest.approx(8.0 * 1.002, rel=1e-14)

    def test_zero_temperature(self):
        fn = ExcessMortalityFn()
        out = dynamics.step_population(8.0, 1.002, 0.06, 0.0, fn)
        assert out == pytest.approx(8.0 * 1.002, rel=1e-14)

    def test_scalar_oracle(self):
        fn = ExcessMortalityFn()
        delta = fn(2.5)  # the mortality module is the oracle here
        expected = 8.0 * 1.002 - 0.06 * delta
        out = dynamics.step_population(8.0, 1.002, 0.06, 2.5, fn)
        assert out == pytest.approx(expected, rel=1e-14)
        assert out == pytest.approx(8.0156, abs=1e-4)

    def test_degenerate(self):
        with pytest.raises(DomainError):
            dynamics.step_population(0.001, 0.1, 5.0, 3.0, ExcessMortalityFn())


class TestUtility:
    def test_unit_per_capita(self):
        assert dynamics.utility(7.0, 7.0, 1.45) == pytest.approx(
            7.0 / (1.0 - 1.45), rel=1e-14
        )

    def test_scalar_oracle(self):
        expected = 2.0 ** (-0.45) / (-0.45)
        assert dynamics.utility(2.0, 1.0, 1.45) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(-1.62676, abs=1e-5)

    @given(c=st.floats(0.1, 1e4), level=st.floats(0.1, 20.0))
    @settings(max_examples=100)
    def test_degree_one_homogeneity(self, c, level):
        u1 = dynamics.utility(c, level, 1.45)
        u2 = dynamics.utility(2 * c, 2 * level, 1.45)
        assert u2 == pytest.approx(2 * u1, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            dynamics.utility(0.0, 1.0, 1.45)
        with pytest.raises(DomainError):
            dynamics.utility(1.0, -1.0, 1.45)


def test_step_functions_deterministic(params):
    m = np.array([851.0, 460.0, 1740.0])
    a = dynamics.step_carbon(m, 35.85, params)
    b = dynamics.step_carbon(m, 35.85, params)
    assert a.tobytes() == b.tobytes()
    t = np.array([0.85, 0.0068])
    x = dynamics.step_temperature(t, 2.46, params)
    y = dynamics.step_temperature(t, 2.46, params)
    assert x.tobytes() == y.tobytes()
