"""Welfare maximisation over savings (and optionally abatement) paths.

The solver is a box-constrained quasi-Newton method (L-BFGS-B) fed with
central finite-difference gradients evaluated in one batched simulation
per iterate. The wrapper keeps a solver-agnostic surface: everything the
rest of the package sees is an :class:`OptimizationProblem` in and a
:class:`ScenarioRun` out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .dynamics import utility
from .errors import ConfigError, SolverError
from .exogenous import ExogenousPaths
from .params import ModelParams, StateVector
from .scenario import FULLY_OPTIMAL, NET_ZERO, ZERO_INDUSTRIAL, ControlSchedule
from .simulate import PopulationExtension, Trajectory, simulate, simulate_welfare


@dataclass
class SolverOptions:
    gtol: float = 1e-6          # projected-gradient infinity norm target
    ftol: float = 1e-10         # relative objective improvement floor
    maxiter: int = 2000
    fd_step: float = 1e-6       # relative FD step for solver gradients
    fd_floor: float = 0.1       # |x| floor when scaling the FD step
    maxls: int = 40


@dataclass
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != self.upper.shape:
            raise ConfigError("bound arrays must have equal shapes")
        if np.any(self.lower > self.upper):
            raise ConfigError("lower bounds exceed upper bounds")


def dice_savings_bounds(params: ModelParams, raw: dict) -> Bounds:
    """DICE-2016 savings box: [0.1, 0.9] with the terminal periods pinned
    to the long-run rate to suppress end-of-horizon dissaving."""
    n = params.n_periods + 1
    lo = np.full(n, raw.get("dice_savings_lower", 0.1))
    hi = np.full(n, raw.get("dice_savings_upper", 0.9))
    tail = int(raw.get("dice_terminal_savings_periods", 10))
    if tail > 0:
        s_star = params.optimal_longrun_savings
        lo[-tail:] = s_star
        hi[-tail:] = s_star
    return Bounds(lo, hi)


def dice_mu_bounds(params: ModelParams, raw: dict) -> Bounds:
    """DICE-2016 abatement box: first period fixed at the observed 2015
    control, cap 1 through 2155, then the negative-emission cap."""
    n = params.n_periods + 1
    lo = np.full(n, 0.01)
    hi = np.full(n, params.mu_max)
    cap_until = int(raw.get("dice_mu_cap_one_until_period", 28))
    hi[: cap_until + 1] = 1.0
    mu0 = raw.get("dice_mu_initial", 0.03)
    lo[0] = mu0
    hi[0] = mu0
    return Bounds(lo, hi)


@dataclass
class OptimizationProblem:
    params: ModelParams
    exog: ExogenousPaths
    schedule: ControlSchedule
    initial_state: StateVector
    s_bounds: Bounds
    mu_bounds: Bounds | None = None
    s_init: np.ndarray | None = None
    mu_init: np.ndarray | None = None
    mu_reparam_cap: float = 20.0
    population: PopulationExtension | None = None
    options: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        n = self.params.n_periods + 1
        if self.s_bounds.lower.shape != (n,):
            raise ConfigError("savings bounds must cover every period")
        if np.any(self.s_bounds.lower < 0) or np.any(self.s_bounds.upper > 1):
            raise ConfigError("savings bounds must lie within [0, 1]")
        if self.schedule.kind == FULLY_OPTIMAL and self.mu_bounds is None:
            raise ConfigError("fully-optimal mode needs abatement bounds")
        if self.schedule.kind != FULLY_OPTIMAL:
            values = self.schedule.values
            if values is None or values.shape != (n,):
                raise ConfigError("schedule values must cover every period")


@dataclass
class ScenarioRun:
    """A solved trajectory plus solver diagnostics."""

    trajectory: Trajectory
    schedule_label: str
    welfare: float
    diagnostics: dict

    @property
    def years(self) -> np.ndarray:
        return self.trajectory.years


def welfare_of(C, L, params: ModelParams) -> float:
    """Discounted welfare of a consumption/population path."""
    C = np.asarray(C, dtype=float)
    L = np.asarray(L, dtype=float)
    if C.shape[0] != params.n_periods + 1:
        raise ConfigError("welfare needs n_periods+1 entries")
    rho_pow = params.rho ** np.arange(C.shape[0])
    return float(np.sum(utility(C, L, params.alpha) * rho_pow))


def _fd_steps(x: np.ndarray, free: np.ndarray, opts: SolverOptions) -> np.ndarray:
    return opts.fd_step * np.maximum(np.abs(x[free]), opts.fd_floor)


class _BatchObjective:
    """Negative welfare and its central-difference gradient, evaluated in
    a single batched simulation per call."""

    def __init__(self, problem: OptimizationProblem):
        self.p = problem
        n = problem.params.n_periods + 1
        self.n = n
        self.joint = problem.schedule.kind == FULLY_OPTIMAL
        s_fixed = problem.s_bounds.lower == problem.s_bounds.upper
        if self.joint:
            mu_fixed = problem.mu_bounds.lower == problem.mu_bounds.upper
            self.free = np.flatnonzero(~np.concatenate([s_fixed, mu_fixed]))
        else:
            self.free = np.flatnonzero(~s_fixed)
        self.n_calls = 0

    def lower(self) -> np.ndarray:
        if self.joint:
            return np.concatenate([self.p.s_bounds.lower, self.p.mu_bounds.lower])
        return self.p.s_bounds.lower

    def upper(self) -> np.ndarray:
        if self.joint:
            return np.concatenate([self.p.s_bounds.upper, self.p.mu_bounds.upper])
        return self.p.s_bounds.upper

    def welfare_batch(self, xs: np.ndarray) -> np.ndarray:
        p = self.p
        if self.joint:
            s, mu = xs[:, : self.n], xs[:, self.n :]
            return simulate_welfare(
                p.params, p.exog, p.initial_state, s, mu=mu,
                mu_reparam_cap=p.mu_reparam_cap, population=p.population,
            )
        if p.schedule.kind == NET_ZERO:
            return simulate_welfare(
                p.params, p.exog, p.initial_state, xs,
                mu_tilde=p.schedule.values,
                mu_reparam_cap=p.mu_reparam_cap, population=p.population,
            )
        if p.schedule.kind == ZERO_INDUSTRIAL:
            return simulate_welfare(
                p.params, p.exog, p.initial_state, xs,
                mu=p.schedule.values[np.newaxis, :],
                mu_reparam_cap=p.mu_reparam_cap, population=p.population,
            )
        raise ConfigError(f"unhandled schedule kind {p.schedule.kind!r}")

    def __call__(self, x: np.ndarray):
        self.n_calls += 1
        free = self.free
        h = _fd_steps(x, free, self.p.options)
        k = free.size
        xs = np.tile(x, (1 + 2 * k, 1))
        rows = np.arange(k)
        xs[1 + 2 * rows, free] += h
        xs[2 + 2 * rows, free] -= h
        W = self.welfare_batch(xs)
        f = -W[0]
        g = np.zeros_like(x)
        g[free] = -(W[1 + 2 * rows] - W[2 + 2 * rows]) / (2.0 * h)
        return f, g

    def gradient(self, x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
        """Standalone central-difference welfare gradient (for checks)."""
        free = self.free
        h = rel_step * np.maximum(np.abs(x[free]), 0.1)
        g = np.zeros_like(x)
        for j, idx in enumerate(free):
            xp, xm = x.copy(), x.copy()
            xp[idx] += h[j]
            xm[idx] -= h[j]
            wp = self.welfare_batch(xp[np.newaxis, :])[0]
            wm = self.welfare_batch(xm[np.newaxis, :])[0]
            g[idx] = (wp - wm) / (2.0 * h[j])
        return g


def projected_gradient_norm(x, g, lower, upper) -> float:
    """Infinity norm of the gradient projected on the box (for a
    minimisation problem)."""
    pg = g.copy()
    at_lo = x <= lower
    at_hi = x >= upper
    pg[at_lo] = np.minimum(g[at_lo], 0.0)
    pg[at_hi] = np.maximum(g[at_hi], 0.0)
    pg[at_lo & at_hi] = 0.0
    return float(np.max(np.abs(pg))) if pg.size else 0.0


def _solve(problem: OptimizationProblem) -> ScenarioRun:
    opts = problem.options
    objective = _BatchObjective(problem)
    n = objective.n

    if problem.s_init is not None:
        s0 = np.asarray(problem.s_init, dtype=float)
    else:
        s0 = np.full(n, 0.25)
    s0 = np.clip(s0, problem.s_bounds.lower, problem.s_bounds.upper)
    if objective.joint:
        if problem.mu_init is not None:
            mu0 = np.asarray(problem.mu_init, dtype=float)
        else:
            mu0 = 0.01 * np.arange(n)  # gentle ramp start
        mu0 = np.clip(mu0, problem.mu_bounds.lower, problem.mu_bounds.upper)
        x0 = np.concatenate([s0, mu0])
    else:
        x0 = s0

    lower, upper = objective.lower(), objective.upper()
    result = minimize(
        objective,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=list(zip(lower, upper)),
        options={
            "maxiter": opts.maxiter,
            "ftol": opts.ftol,
            "gtol": opts.gtol,
            "maxls": opts.maxls,
            "maxfun": 10 * opts.maxiter,
        },
    )
    if not result.success and "ABNORMAL" in str(result.message).upper():
        raise SolverError(
            f"welfare optimisation failed: {result.message}",
            diagnostics={"nit": int(result.nit), "nfev": int(result.nfev)},
        )

    x = np.clip(result.x, lower, upper)
    f, g = objective(x)
    pg_norm = projected_gradient_norm(x, g, lower, upper)

    if objective.joint:
        s, mu = x[:n], x[n:]
        trajectory = simulate(
            problem.params, problem.exog, problem.initial_state, s, mu=mu,
            mu_reparam_cap=problem.mu_reparam_cap, population=problem.population,
        )
    else:
        s = x
        kwargs = (
            {"mu_tilde": problem.schedule.values}
            if problem.schedule.kind == NET_ZERO
            else {"mu": problem.schedule.values}
        )
        trajectory = simulate(
            problem.params, problem.exog, problem.initial_state, s,
            mu_reparam_cap=problem.mu_reparam_cap, population=problem.population,
            **kwargs,
        )

    diagnostics = {
        "iterations": int(result.nit),
        "n_objective_evals": int(result.nfev),
        "objective": float(-result.fun),
        "projected_gradient_norm": pg_norm,
        "converged": bool(result.success or pg_norm <= opts.gtol),
        "message": str(result.message),
        "schedule": problem.schedule.label,
        "mu_cap_hits": trajectory.mu_cap_hits,
    }
    return ScenarioRun(
        trajectory=trajectory,
        schedule_label=problem.schedule.label,
        welfare=trajectory.welfare,
        diagnostics=diagnostics,
    )


def optimize_consumption(problem: OptimizationProblem) -> ScenarioRun:
    """Maximise welfare over the savings path with the schedule fixed."""
    if problem.schedule.kind == FULLY_OPTIMAL:
        raise ConfigError("use optimize_full for the fully-optimal mode")
    return _solve(problem)


def optimize_full(problem: OptimizationProblem) -> ScenarioRun:
    """Jointly maximise welfare over savings and abatement paths."""
    if problem.schedule.kind != FULLY_OPTIMAL:
        raise ConfigError("optimize_full requires the fully-optimal schedule")
    return _solve(problem)
