"""Social cost of carbon along a solved trajectory.

Primary method: NPV of consumption losses from a one-period emission
pulse, discounted with the marginal-utility factor implied by the run
(rho^(s-t) times the ratio of per-capita marginal utilities). The
welfare-derivative ratio is kept as an independent consistency check.
Controls are held fixed during re-simulation: this is the cost of carbon
along the given path, not a re-optimised one.
"""

from __future__ import annotations

import numpy as np

from .errors import PulseError
from .optimizer import OptimizationProblem, ScenarioRun
from .simulate import Trajectory, simulate


def _resimulate(problem: OptimizationProblem, trajectory: Trajectory,
                e_extra: np.ndarray) -> Trajectory:
    # oversized pulses can wreck the economy mid-horizon; NaNs are caught
    # by the callers, so silence the transient power warnings
    with np.errstate(invalid="ignore"):
        return simulate(
            problem.params,
            problem.exog,
            problem.initial_state,
            trajectory.s,
            mu=trajectory.mu,
            e_extra=e_extra,
            mu_reparam_cap=problem.mu_reparam_cap,
            population=problem.population,
        )


def _mu_discount(trajectory: Trajectory, params, t_idx: int) -> np.ndarray:
    """rho^(s-t) * (c_s/c_t)^(-alpha) for s >= t, zero before t."""
    c = trajectory.C / trajectory.L
    t = np.arange(c.shape[0])
    df = params.rho ** (t - t_idx) * (c / c[t_idx]) ** (-params.alpha)
    df[:t_idx] = 0.0
    return df


def scc_pulse(
    run: ScenarioRun,
    problem: OptimizationProblem,
    t_pulse: int,
    pulse_size: float = 1.0,
) -> float:
    """SCC in USD per ton of CO2 released in period ``t_pulse``.

    ``pulse_size`` is the released CO2 mass in GtCO2; it enters the
    simulation as a flow increase of pulse_size/delta_years for one
    period, so exactly pulse_size of extra CO2 reaches the carbon cycle.
    """
    if pulse_size <= 0:
        raise PulseError("pulse_size must be positive")
    params = problem.params
    base = run.trajectory
    e_extra = np.zeros(params.n_periods + 1)
    e_extra[t_pulse] = pulse_size / params.delta_years
    pulsed = _resimulate(problem, base, e_extra)
    if not np.all(pulsed.C > 0):  # catches non-positive and NaN
        raise PulseError(
            f"pulse of {pulse_size} GtCO2 drove consumption non-positive; "
            "use a smaller pulse"
        )
    d_consumption = base.C - pulsed.C  # trillions USD per year
    df = _mu_discount(base, params, t_pulse)
    npv = float(np.sum(df * d_consumption) * params.delta_years)  # trillions USD
    return 1000.0 * npv / pulse_size


def scc_welfare_ratio(
    run: ScenarioRun,
    problem: OptimizationProblem,
    t: int,
    e_step: float = 1e-3,
    c_rel_step: float = 1e-4,
) -> float:
    """SCC as -1000 * (dW/dE_t) / (dW/dC_t), both by central differences.

    dW/dE_t re-simulates the downstream path with the period-t emission
    flow perturbed by +-e_step GtCO2/yr; dW/dC_t perturbs the welfare
    function's consumption argument directly.
    """
    params = problem.params
    base = run.trajectory
    e_extra = np.zeros(params.n_periods + 1)

    e_extra[t] = e_step
    w_plus = _resimulate(problem, base, e_extra).welfare
    e_extra[t] = -e_step
    w_minus = _resimulate(problem, base, e_extra).welfare
    # per unit of annual emission flow; one flow unit carries delta_years
    # of CO2 mass, which mirrors the delta_years-weighted NPV of the
    # pulse method, so the two conventions agree per ton
    dw_de = (w_plus - w_minus) / (2.0 * e_step)

    h = c_rel_step * base.C[t]
    rho_t = params.rho**t

    def period_utility(c_t: float) -> float:
        L = base.L[t]
        return L * (c_t / L) ** (1.0 - params.alpha) / (1.0 - params.alpha)

    dw_dc = rho_t * (period_utility(base.C[t] + h) - period_utility(base.C[t] - h)) / (
        2.0 * h
    )
    return -1000.0 * dw_de / dw_dc


def scc_grid(
    run: ScenarioRun,
    problem: OptimizationProblem,
    through_year: int | None = 2100,
    pulse_size: float = 1.0,
    linearity_check: bool = False,
) -> dict:
    """SCC (pulse method) for every grid period up to ``through_year``.

    Returns a dict with the SCC array (NaN beyond the requested horizon)
    and, when requested, the worst relative change under pulse halving.
    """
    years = run.years
    n = len(years)
    last = n - 1 if through_year is None else int(np.searchsorted(years, through_year))
    scc = np.full(n, np.nan)
    worst_halving = 0.0
    for t in range(last + 1):
        scc[t] = scc_pulse(run, problem, t, pulse_size)
        if linearity_check:
            half = scc_pulse(run, problem, t, pulse_size / 2.0)
            worst_halving = max(worst_halving, abs(half - scc[t]) / abs(scc[t]))
    out = {"years": years.copy(), "scc_usd_per_tco2": scc, "pulse_size": pulse_size}
    if linearity_check:
        out["max_halving_rel_change"] = worst_halving
    return out
