import numpy as np
import pytest

from climstress.errors import ConfigError, DomainError
from climstress.params import (
    ControlVector,
    ModelParams,
    StateVector,
    backstop_theta1,
    bind_theta1,
    grid_years,
    load_parameter_file,
)


def test_parameter_file_loads_canonical_values(raw):
    assert raw["alpha"] == 1.45
    assert raw["gamma"] == 0.3
    assert raw["theta2"] == 2.6
    assert raw["pi2"] == 0.00236
    assert raw["beta_co2"] == 3.666
    assert raw["m_at_preindustrial"] == 588.0
    assert raw["delta_years"] == 5
    assert raw["n_periods"] == 100


def test_model_params_from_mapping(params):
    assert params.phi_m.shape == (3, 3)
    assert params.phi_t.shape == (2, 2)
    # carbon transfer conserves mass column-wise
    np.testing.assert_allclose(params.phi_m.sum(axis=0), 1.0, rtol=0, atol=1e-12)
    # rho consistent with the annual time-preference rate
    assert params.rho == pytest.approx((1.015) ** -5, rel=1e-12)


def test_longrun_savings_rate(params):
    # (delta_k + 0.004) / (delta_k + 0.004*alpha + prstp) * gamma
    assert params.optimal_longrun_savings == pytest.approx(0.2582781456953642)


def test_grid_years(params):
    years = grid_years(params)
    assert years[0] == 2015
    assert years[-1] == 2015 + 5 * 100
    assert len(years) == 101


def test_backstop_theta1_formula(params):
    sigma = np.array([0.35, 0.30])
    theta1 = backstop_theta1(sigma, params)
    assert theta1[0] == pytest.approx(550.0 * 0.35 / 2600.0)
    assert theta1[1] == pytest.approx(550.0 * 0.975 * 0.30 / 2600.0)


def test_bind_theta1_validates_length(params):
    with pytest.raises(ConfigError):
        bind_theta1(params, np.ones(5))


def test_invalid_params_rejected(raw):
    good = dict(raw)

    bad = dict(good, alpha=1.0)
    with pytest.raises(DomainError):
        ModelParams.from_mapping(bad)

    bad = dict(good, rho=1.2)
    with pytest.raises(DomainError):
        ModelParams.from_mapping(bad)

    bad = dict(good, rho=0.9)  # inconsistent with prstp
    with pytest.raises(ConfigError):
        ModelParams.from_mapping(bad)

    bad = dict(good, phi_m_11=0.5)  # breaks the column sum
    with pytest.raises(ConfigError):
        ModelParams.from_mapping(bad)

    bad = dict(good, delta_years=1)
    with pytest.raises(ConfigError):
        ModelParams.from_mapping(bad)


def test_missing_key_is_config_error(raw):
    incomplete = {k: v for k, v in raw.items() if k != "alpha"}
    with pytest.raises(ConfigError):
        ModelParams.from_mapping(incomplete)


def test_parameter_file_parse_errors(tmp_path):
    bad = tmp_path / "bad.params"
    bad.write_text("alpha 1.45\n")
    with pytest.raises(ConfigError):
        load_parameter_file(bad)
    dup = tmp_path / "dup.params"
    dup.write_text("alpha = 1.45\nalpha = 1.44\n")
    with pytest.raises(ConfigError):
        load_parameter_file(dup)
    with pytest.raises(ConfigError):
        load_parameter_file(tmp_path / "missing.params")


def test_state_vector_validation():
    good = StateVector(K=223.0, m_at=851.0, m_up=460.0, m_lo=1740.0,
                       t_at=0.85, t_lo=0.0068, L=7.403)
    good.validate()
    with pytest.raises(DomainError):
        StateVector(K=-1.0, m_at=851.0, m_up=460.0, m_lo=1740.0,
                    t_at=0.85, t_lo=0.0068, L=7.403).validate()
    with pytest.raises(DomainError):
        StateVector(K=223.0, m_at=851.0, m_up=460.0, m_lo=1740.0,
                    t_at=float("nan"), t_lo=0.0068, L=7.403).validate()


def test_control_vector_validation():
    ControlVector(s=0.25, mu=1.0).validate()
    with pytest.raises(DomainError):
        ControlVector(s=1.2, mu=0.0).validate()
    with pytest.raises(DomainError):
        ControlVector(s=0.2, mu=1.3).validate()
    ControlVector(s=0.2, mu=1.19).validate(mu_max=1.2)
