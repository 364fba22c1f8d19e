"""Deterministic trajectory simulation on the 5-year grid.

The simulator is batched: savings/abatement control paths of shape
(B, n_periods+1) are propagated simultaneously with states held as
(B,) arrays, which makes finite-difference gradients of welfare cheap.
The per-step formulas are exactly those in :mod:`climstress.dynamics`;
``tests/test_simulate.py`` pins the two code paths against each other
step by step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .exogenous import ExogenousPaths
from .params import ModelParams, StateVector

#: smallest admissible atmospheric carbon stock, GtC
_M_AT_FLOOR = 1.0


@dataclass
class PopulationExtension:
    """Endogenous population inputs (off by default in scenario runs).

    growth_factor[t] multiplies L_t to give next-period population before
    excess deaths; deaths[t] is the per-period death count in billions;
    excess_mortality maps temperature anomaly to the fractional mortality
    increase.
    """

    growth_factor: np.ndarray
    deaths: np.ndarray
    excess_mortality: object


@dataclass
class Trajectory:
    """A solved or simulated path; arrays have length n_periods+1."""

    years: np.ndarray
    s: np.ndarray
    mu: np.ndarray
    mu_tilde: np.ndarray | None
    K: np.ndarray
    m_at: np.ndarray
    m_up: np.ndarray
    m_lo: np.ndarray
    t_at: np.ndarray
    t_lo: np.ndarray
    L: np.ndarray
    y_gross: np.ndarray
    omega: np.ndarray
    q_net: np.ndarray
    C: np.ndarray
    e_ind: np.ndarray
    e_land: np.ndarray
    e_total: np.ndarray
    forcing: np.ndarray
    welfare: float
    mu_cap_hits: int = 0
    diagnostics: dict = field(default_factory=dict)

    def state_at(self, idx: int) -> StateVector:
        return StateVector(
            K=float(self.K[idx]),
            m_at=float(self.m_at[idx]),
            m_up=float(self.m_up[idx]),
            m_lo=float(self.m_lo[idx]),
            t_at=float(self.t_at[idx]),
            t_lo=float(self.t_lo[idx]),
            L=float(self.L[idx]),
        )

    def value_at_year(self, name: str, year: int) -> float:
        idx = np.searchsorted(self.years, year)
        if idx >= len(self.years) or self.years[idx] != year:
            raise ConfigError(f"year {year} not on the trajectory grid")
        return float(getattr(self, name)[idx])


def _as_batch(x, n_cols: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    if x.shape[1] != n_cols:
        raise ConfigError(f"control path has {x.shape[1]} periods, expected {n_cols}")
    return x


def simulate_welfare(
    params: ModelParams,
    exog: ExogenousPaths,
    init: StateVector,
    s,
    mu=None,
    mu_tilde=None,
    e_extra: np.ndarray | None = None,
    mu_reparam_cap: float = 20.0,
    population: PopulationExtension | None = None,
) -> np.ndarray:
    """Welfare of each control path in the batch; shape (B,)."""
    return _run(
        params, exog, init, s, mu, mu_tilde, e_extra, mu_reparam_cap, population,
        store=False,
    )


def simulate(
    params: ModelParams,
    exog: ExogenousPaths,
    init: StateVector,
    s,
    mu=None,
    mu_tilde=None,
    e_extra: np.ndarray | None = None,
    mu_reparam_cap: float = 20.0,
    population: PopulationExtension | None = None,
) -> Trajectory:
    """Simulate a single control path and return the full trajectory."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 1:
        raise ConfigError("simulate() takes a single control path; use the batch API")
    return _run(
        params, exog, init, s, mu, mu_tilde, e_extra, mu_reparam_cap, population,
        store=True,
    )


def _run(params, exog, init, s, mu, mu_tilde, e_extra, mu_reparam_cap, population,
         store):
    n = params.n_periods
    T = n + 1
    if params.theta1_path is None:
        raise ConfigError("theta1_path is unbound; call bind_theta1() first")
    theta1 = params.theta1_path
    if (mu is None) == (mu_tilde is None):
        raise ConfigError("provide exactly one of mu or mu_tilde")

    s = _as_batch(s, T)
    B = s.shape[0]
    if mu is not None:
        mu_in = _as_batch(mu, T)
        if mu_in.shape[0] not in (1, B):
            raise ConfigError("mu batch size mismatch")
        if mu_in.shape[0] == 1 and B > 1:
            mu_in = np.broadcast_to(mu_in, (B, T))
    else:
        mu_tilde = np.asarray(mu_tilde, dtype=float)
        if mu_tilde.shape != (T,):
            raise ConfigError(f"mu_tilde must have length {T}")
    if e_extra is not None:
        e_extra = np.asarray(e_extra, dtype=float)
        if e_extra.shape != (T,):
            raise ConfigError(f"e_extra must have length {T}")

    alpha, gamma = params.alpha, params.gamma
    dyears = float(params.delta_years)
    theta2, pi2 = params.theta2, params.pi2
    beta = params.beta_co2
    m_star = params.m_at_preindustrial
    eta, xi1 = params.eta, params.xi1
    phi_m, phi_t = params.phi_m, params.phi_t
    keep = (1.0 - params.delta_k) ** dyears
    rho_pow = params.rho ** np.arange(T)

    K = np.full(B, init.K)
    M = np.empty((3, B))
    M[0], M[1], M[2] = init.m_at, init.m_up, init.m_lo
    Tv = np.empty((2, B))
    Tv[0], Tv[1] = init.t_at, init.t_lo
    if population is not None:
        L_t = np.full(B, init.L)
    W = np.zeros(B)
    mu_cap_hits = 0
    m_floor_hits = 0

    if store:
        cols = {
            name: np.empty(T)
            for name in (
                "mu_out", "K_o", "m_at", "m_up", "m_lo", "t_at", "t_lo", "L_o",
                "y_gross", "omega", "q_net", "C_o", "e_ind", "e_total", "forcing",
            )
        }
        cols["forcing"][0] = eta * np.log2(init.m_at / m_star) + exog.f_ex[0]

    for t in range(T):
        L = L_t if population is not None else exog.L[t]
        Y = exog.A[t] * K**gamma * L ** (1.0 - gamma)
        if mu_tilde is not None:
            sy = exog.sigma[t] * Y
            mt = mu_tilde[t]
            mu_raw = mt * (1.0 + exog.e_land[t] / sy)
            mu_t = np.clip(mu_raw, 0.0, mu_reparam_cap)
            e_exact = (1.0 - mt) * (sy + exog.e_land[t])
            clamped = mu_t != mu_raw
            e_total = np.where(clamped, (1.0 - mu_t) * sy + exog.e_land[t], e_exact)
            mu_cap_hits += int(bool(np.asarray(clamped).flat[0]))
        else:
            mu_t = mu_in[:, t]
            e_total = (1.0 - mu_t) * exog.sigma[t] * Y + exog.e_land[t]
        omega = 1.0 - theta1[t] * mu_t**theta2 - pi2 * Tv[0] ** 2
        Q = omega * Y
        C = (1.0 - s[:, t]) * Q
        # keep utility defined if a trial point drives net output negative
        c_safe = np.maximum(C, 1e-9)
        W += rho_pow[t] * L * (c_safe / L) ** (1.0 - alpha) / (1.0 - alpha)

        if store:
            cols["mu_out"][t] = mu_t[0]
            cols["K_o"][t] = K[0]
            cols["m_at"][t], cols["m_up"][t], cols["m_lo"][t] = M[0, 0], M[1, 0], M[2, 0]
            cols["t_at"][t], cols["t_lo"][t] = Tv[0, 0], Tv[1, 0]
            cols["L_o"][t] = L[0] if population is not None else L
            cols["y_gross"][t] = Y[0]
            cols["omega"][t] = omega[0]
            cols["q_net"][t] = Q[0]
            cols["C_o"][t] = C[0]
            cols["e_total"][t] = e_total[0]
            cols["e_ind"][t] = e_total[0] - exog.e_land[t]

        if t == n:
            break
        e_sim = e_total if e_extra is None else e_total + e_extra[t]
        t_at_now = Tv[0].copy() if population is not None else None
        M = phi_m @ M
        M[0] += dyears * e_sim / beta
        # massive negative-emission inputs could exhaust the atmospheric
        # box; keep the log argument positive and record the event
        if M[0].min() <= _M_AT_FLOOR:
            m_floor_hits += int(M[0].flat[0] <= _M_AT_FLOOR)
            M[0] = np.maximum(M[0], _M_AT_FLOOR)
        F_next = eta * np.log2(M[0] / m_star) + exog.f_ex[t + 1]
        Tv = phi_t @ Tv
        Tv[0] += xi1 * F_next
        K = K * keep + dyears * s[:, t] * Q
        if population is not None:
            # excess deaths respond to the temperature of the ending period
            L_t = L_t * population.growth_factor[t] - population.deaths[
                t
            ] * population.excess_mortality(t_at_now)
        if store:
            cols["forcing"][t + 1] = F_next[0]

    if not store:
        return W

    return Trajectory(
        years=exog.years.copy(),
        s=s[0].copy(),
        mu=cols["mu_out"],
        mu_tilde=None if mu_tilde is None else np.asarray(mu_tilde, dtype=float).copy(),
        K=cols["K_o"],
        m_at=cols["m_at"],
        m_up=cols["m_up"],
        m_lo=cols["m_lo"],
        t_at=cols["t_at"],
        t_lo=cols["t_lo"],
        L=cols["L_o"],
        y_gross=cols["y_gross"],
        omega=cols["omega"],
        q_net=cols["q_net"],
        C=cols["C_o"],
        e_ind=cols["e_ind"],
        e_land=exog.e_land.copy(),
        e_total=cols["e_total"],
        forcing=cols["forcing"],
        welfare=float(W[0]),
        mu_cap_hits=mu_cap_hits,
        diagnostics={"m_at_floor_hits": m_floor_hits},
    )
