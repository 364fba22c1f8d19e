"""State-transition equations of the climate-economy core.

Pure functions over scalars or numpy arrays; no shared state, safe to
call concurrently. The batched simulator in :mod:`climstress.simulate`
inlines the same formulas for speed; a test pins the two paths to
bit-identical outputs.

Unit conventions (fixed, no auto-conversion):
  output/consumption  trillions 2010 USD per year
  carbon stocks       GtC; emissions GtCO2 per year
  temperatures        degC above 1900
  population          billions
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .params import ModelParams


def gross_output(A, K, L, gamma: float):
    """Cobb-Douglas gross output A * K^gamma * L^(1-gamma)."""
    if np.any(np.asarray(A) <= 0) or np.any(np.asarray(K) <= 0) or np.any(
        np.asarray(L) <= 0
    ):
        raise DomainError("gross_output requires A, K, L > 0")
    return A * K**gamma * L ** (1.0 - gamma)


def damage_abatement_factor(mu, t_at, theta1, theta2: float, pi2: float):
    """Fraction of gross output left after abatement cost and damages.

    1 - theta1 * mu^theta2 - pi2 * t_at^2
    """
    if np.any(np.asarray(mu) < 0):
        raise DomainError("mu must be >= 0")
    if np.any(np.asarray(theta1) < 0):
        raise DomainError("theta1 must be >= 0")
    return 1.0 - theta1 * mu**theta2 - pi2 * np.square(t_at)


def industrial_emissions(mu, sigma, Y):
    """Industrial CO2 emissions (1 - mu) * sigma * Y in GtCO2/yr."""
    return (1.0 - mu) * sigma * Y


def radiative_forcing(m_at, f_ex, eta: float, m_star: float):
    """Forcing eta * log2(m_at / m_star) + f_ex in W/m^2."""
    if np.any(np.asarray(m_at) <= 0):
        raise DomainError("atmospheric carbon stock must be positive")
    return eta * np.log2(m_at / m_star) + f_ex


def step_carbon(m, e_total, params: ModelParams):
    """Advance the three-box carbon stocks one period.

    phi_m @ m + delta_years * (e_total / beta_co2, 0, 0); emissions are
    CO2 mass flows, stocks are carbon mass, hence the division by the
    CO2-to-carbon ratio. Total carbon changes by exactly
    delta_years * e_total / beta_co2.
    """
    m = np.asarray(m, dtype=float)
    if np.any(m <= 0):
        raise DomainError("carbon stocks must be positive")
    out = params.phi_m @ m
    injection = params.delta_years * e_total / params.beta_co2
    if out.ndim == 1:
        out[0] += injection
    else:  # batched: m has shape (3, B)
        out[0] += injection
    return out


def step_temperature(t, f_next, params: ModelParams):
    """Advance (T_AT, T_LO) one period given next-period forcing."""
    t = np.asarray(t, dtype=float)
    out = params.phi_t @ t
    out[0] += params.xi1 * f_next
    return out


def step_capital(K, Q, C, params: ModelParams):
    """Capital accumulation K*(1-delta_k)^delta_years + delta_years*(Q-C)."""
    if np.any(np.asarray(K) <= 0):
        raise DomainError("capital must be positive")
    if np.any(np.asarray(C) > np.asarray(Q)):
        raise DomainError("consumption cannot exceed net output")
    if np.any(np.asarray(C) < 0):
        raise DomainError("consumption must be >= 0")
    return K * (1.0 - params.delta_k) ** params.delta_years + params.delta_years * (
        Q - C
    )


def step_population(L, growth_factor, n_deaths, t_at, excess_mortality):
    """Population extension step.

    L * growth_factor - n_deaths * delta(t_at), with growth_factor the
    calibrated (1 + births - deaths) per-period factor and n_deaths the
    per-period death count in billions.
    """
    if np.any(np.asarray(L) <= 0):
        raise DomainError("population must be positive")
    if np.any(np.asarray(n_deaths) < 0):
        raise DomainError("death count must be >= 0")
    nxt = L * growth_factor - n_deaths * excess_mortality(t_at)
    if np.any(np.asarray(nxt) <= 0):
        raise DomainError("population extension produced non-positive population")
    return nxt


def utility(C, L, alpha: float):
    """Per-period utility L * (C/L)^(1-alpha) / (1-alpha)."""
    if np.any(np.asarray(C) <= 0):
        raise DomainError("consumption must be positive")
    if np.any(np.asarray(L) <= 0):
        raise DomainError("population must be positive")
    return L * (C / L) ** (1.0 - alpha) / (1.0 - alpha)
