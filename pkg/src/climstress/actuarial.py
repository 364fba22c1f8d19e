"""Monte Carlo stress testing of life portfolios and human capital.

Both portfolio statistics are death-benefit sums: for an annuity book
the aggregate that is *not* paid because policyholders died during the
stress year, for an insurance book the aggregate that *is* paid on those
deaths. Deaths are independent Bernoulli draws per policy; the base
(no-climate) and stressed runs share the same uniforms so deviations are
estimated with common random numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import ConfigError, DomainError, NumericError
from .mortality import (
    CubicDamage,
    ExcessMortalityFn,
    GompertzLaw,
    MortalityTable,
    adjusted_q,
    annualize_temperature,
)

ANNUITY = "annuity"
INSURANCE = "insurance"


@dataclass
class Cohort:
    age: int
    count: int
    sum_insured: float


@dataclass
class PortfolioSpec:
    kind: str
    cohorts: list

    def __post_init__(self):
        if self.kind not in (ANNUITY, INSURANCE):
            raise ConfigError(f"portfolio kind must be annuity|insurance, got {self.kind!r}")
        if not self.cohorts:
            raise ConfigError("portfolio has no cohorts")
        for c in self.cohorts:
            if c.count < 1:
                raise ConfigError("cohort counts must be >= 1")
            if c.sum_insured <= 0:
                raise ConfigError("sums insured must be positive")

    @property
    def n_policies(self) -> int:
        return sum(c.count for c in self.cohorts)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        ages = np.array([c.age for c in self.cohorts], dtype=int)
        counts = np.array([c.count for c in self.cohorts], dtype=int)
        sums = np.array([c.sum_insured for c in self.cohorts], dtype=float)
        return ages, counts, sums

    def to_csv(self, path: str | Path) -> None:
        lines = [f"# kind: {self.kind}", "age,count,sum_insured"]
        for c in self.cohorts:
            lines.append(f"{c.age},{c.count},{c.sum_insured:.12g}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "PortfolioSpec":
        kind = None
        rows = []
        for ln in Path(path).read_text().splitlines():
            stripped = ln.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                if "kind:" in stripped:
                    kind = stripped.split("kind:", 1)[1].strip().lower()
                continue
            if stripped.lower().startswith("age"):
                continue
            age, count, sum_insured = stripped.split(",")
            rows.append(Cohort(int(age), int(count), float(sum_insured)))
        if kind is None:
            raise ConfigError(f"{path}: missing '# kind: annuity|insurance' header")
        return cls(kind=kind, cohorts=rows)


@dataclass
class StressResult:
    """Distribution statistics of the death-benefit aggregate and their
    relative deviations (percent) against the no-climate base case."""

    kind: str
    year: int
    n_sims: int
    seed: int
    n_policies: int
    mean: float
    q01: float
    q99: float
    base_mean: float
    base_q01: float
    base_q99: float
    dev_mean_pct: float
    dev_q01_pct: float
    dev_q99_pct: float
    analytic_dev_mean_pct: float
    mc_se_dev_mean_pct: float
    warnings: list = field(default_factory=list)

    def table_row(self) -> dict:
        return {
            "kind": self.kind,
            "year": self.year,
            "mean_dev_pct": round(self.dev_mean_pct, 2),
            "q01_dev_pct": round(self.dev_q01_pct, 2),
            "q99_dev_pct": round(self.dev_q99_pct, 2),
        }


def _simulate_death_benefits(
    portfolio: PortfolioSpec,
    table: MortalityTable,
    temp_grid_years: np.ndarray,
    temp_grid_values: np.ndarray,
    year: int,
    n_sims: int,
    seed: int,
    fn: ExcessMortalityFn | None,
    chunk: int = 1000,
) -> StressResult:
    fn = fn or ExcessMortalityFn()
    warnings = []
    if n_sims < 1000:
        warnings.append(
            f"n_sims={n_sims} is below 1000; tail percentiles will be unstable"
        )
    t_year = annualize_temperature(temp_grid_years, temp_grid_values, year)
    ages, counts, sums = portfolio.arrays()
    q_base = np.array(
        [table.q_at(a, None if table.years is None else year) for a in ages]
    )
    q_str = adjusted_q(q_base, t_year, fn)

    # per-policy expansion; within a cohort every policy shares q and sum
    policy_q_base = np.repeat(q_base, counts)
    policy_q_str = np.repeat(q_str, counts)
    policy_sums = np.repeat(sums, counts)

    rng = np.random.default_rng(seed)
    agg_base = np.empty(n_sims)
    agg_str = np.empty(n_sims)
    done = 0
    while done < n_sims:
        m = min(chunk, n_sims - done)
        u = rng.random((m, policy_sums.size))
        agg_base[done : done + m] = (u < policy_q_base) @ policy_sums
        agg_str[done : done + m] = (u < policy_q_str) @ policy_sums
        done += m

    def stats(x):
        return float(np.mean(x)), float(np.percentile(x, 1)), float(np.percentile(x, 99))

    mean_b, q01_b, q99_b = stats(agg_base)
    mean_s, q01_s, q99_s = stats(agg_str)

    def dev(stressed, base):
        if base == 0:
            return float("nan")
        return 100.0 * (stressed - base) / base

    # expected relative deviation of the mean: exactly delta(T) when no
    # probability is clamped at 1, since every q scales by (1 + delta)
    exp_base = float(policy_sums @ policy_q_base)
    exp_str = float(policy_sums @ policy_q_str)
    analytic_dev = (
        100.0 * (exp_str - exp_base) / exp_base if exp_base > 0 else float("nan")
    )

    # batch-means standard error of the mean deviation (10 batches)
    n_batches = 10
    usable = (n_sims // n_batches) * n_batches
    if usable >= n_batches and exp_base > 0:
        bb = agg_base[:usable].reshape(n_batches, -1).mean(axis=1)
        bs = agg_str[:usable].reshape(n_batches, -1).mean(axis=1)
        batch_devs = 100.0 * (bs - bb) / bb
        se = float(np.std(batch_devs, ddof=1) / np.sqrt(n_batches))
    else:
        se = float("nan")

    return StressResult(
        kind=portfolio.kind,
        year=year,
        n_sims=n_sims,
        seed=seed,
        n_policies=portfolio.n_policies,
        mean=mean_s,
        q01=q01_s,
        q99=q99_s,
        base_mean=mean_b,
        base_q01=q01_b,
        base_q99=q99_b,
        dev_mean_pct=dev(mean_s, mean_b),
        dev_q01_pct=dev(q01_s, q01_b),
        dev_q99_pct=dev(q99_s, q99_b),
        analytic_dev_mean_pct=analytic_dev,
        mc_se_dev_mean_pct=se,
        warnings=warnings,
    )


def simulate_annuity(
    portfolio: PortfolioSpec,
    table: MortalityTable,
    temp_grid_years,
    temp_grid_values,
    year: int,
    n_sims: int,
    seed: int,
    fn: ExcessMortalityFn | None = None,
) -> StressResult:
    """Distribution of annuity amounts not paid because of deaths in the
    stress year."""
    if portfolio.kind != ANNUITY:
        raise ConfigError("simulate_annuity needs an annuity portfolio")
    return _simulate_death_benefits(
        portfolio, table, temp_grid_years, temp_grid_values, year, n_sims, seed, fn
    )


def simulate_insurance(
    portfolio: PortfolioSpec,
    table: MortalityTable,
    temp_grid_years,
    temp_grid_values,
    year: int,
    n_sims: int,
    seed: int,
    fn: ExcessMortalityFn | None = None,
) -> StressResult:
    """Distribution of death benefits paid in the stress year."""
    if portfolio.kind != INSURANCE:
        raise ConfigError("simulate_insurance needs an insurance portfolio")
    return _simulate_death_benefits(
        portfolio, table, temp_grid_years, temp_grid_values, year, n_sims, seed, fn
    )


@dataclass
class IncomeProfile:
    """Piecewise-linear age-income profile over years since the base age.

    ``segments`` is a list of (t0, t1, y0, y1); income is zero outside
    the segments, discontinuities are allowed at segment joins.
    """

    segments: list

    def __call__(self, t: float) -> float:
        for t0, t1, y0, y1 in self.segments:
            if t0 <= t <= t1:
                if t1 == t0:
                    return y0
                return y0 + (y1 - y0) * (t - t0) / (t1 - t0)
        return 0.0

    @property
    def breakpoints(self) -> list:
        pts = set()
        for t0, t1, _, _ in self.segments:
            pts.update((t0, t1))
        return sorted(pts)


def default_income_profile() -> IncomeProfile:
    """Hump-shaped profile for a 25-year-old: earnings rise to a peak
    near age 45 and stop at retirement (age 65). Approximate placeholder,
    replaceable via configuration."""
    return IncomeProfile(segments=[(0.0, 20.0, 45e3, 85e3), (20.0, 40.0, 85e3, 70e3)])


def human_capital(
    income: IncomeProfile,
    r: float,
    law: GompertzLaw,
    damage: CubicDamage | None = None,
    t_max: float = 85.0,
    epsrel: float = 1e-8,
) -> float:
    """Net present value of future income, discounted by interest and by
    survival under the damage-adjusted hazard lambda(u) * (1 + f(u))."""
    if r < 0:
        raise DomainError("interest rate must be >= 0")
    b = law.dispersion
    a0 = (law.base_age - law.modal_age) / b

    if damage is None:
        def cum_extra(_s):
            return 0.0
    else:
        # closed form for int_0^s p(u) (1/b) e^{a0 + u/b} du with cubic p:
        # antiderivative is e^{a0+u/b} * (p - b p' + b^2 p'' - b^3 p''')(u)
        p0 = damage.coeffs
        p1 = damage.derivative_coeffs(1)
        p2 = damage.derivative_coeffs(2)
        p3 = damage.derivative_coeffs(3)
        qc = p0 - b * p1 + b**2 * p2 - b**3 * p3

        def q_poly(u):
            return np.polyval(qc[::-1], u)

        def cum_extra(s):
            return np.exp(a0 + s / b) * q_poly(s) - np.exp(a0) * q_poly(0.0)

    def integrand(s):
        lam_cum = law.cumulative_hazard(s) + cum_extra(s)
        return income(s) * np.exp(-r * s - lam_cum)

    points = [p for p in income.breakpoints if 0.0 < p < t_max]
    value, abserr = integrate.quad(
        integrand, 0.0, t_max, points=points, limit=400, epsrel=epsrel, epsabs=0.0
    )
    if value != 0.0 and abserr > 100 * epsrel * abs(value):
        raise NumericError(
            f"human-capital quadrature did not converge (err {abserr:.2e})"
        )
    return float(value)
