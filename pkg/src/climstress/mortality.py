"""Temperature-linked excess mortality and baseline mortality laws.

The excess-mortality multiplier is age-independent by default (the
interface accepts any callable delta(T) so age- or country-specific
functions can be slotted in). The climate core runs on a 5-year grid;
everything here works on calendar years after linear interpolation of
the temperature path.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, NumericError, RangeError

EXCESS_MORTALITY_SCALE = 0.0001811
EXCESS_MORTALITY_EXPONENT = 3.745


@dataclass(frozen=True)
class ExcessMortalityFn:
    """Fractional mortality increase delta(T) = a * T^nu for T >= 0."""

    a: float = EXCESS_MORTALITY_SCALE
    nu: float = EXCESS_MORTALITY_EXPONENT

    def __post_init__(self):
        if self.a < 0:
            raise DomainError("scale must be >= 0")

    def __call__(self, t_at):
        t_at = np.asarray(t_at, dtype=float)
        if np.any(t_at < 0):
            raise DomainError("excess mortality is defined for T >= 0")
        out = self.a * t_at**self.nu
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GompertzLaw:
    """Gompertz hazard exp((age - modal_age)/dispersion) / dispersion,
    written for a life aged ``base_age`` at time 0."""

    modal_age: float = 88.23
    dispersion: float = 9.38
    base_age: float = 25.0

    def __post_init__(self):
        if self.dispersion <= 0:
            raise DomainError("dispersion must be positive")

    def hazard(self, t):
        """Force of mortality t years after base_age."""
        return (
            np.exp((self.base_age + np.asarray(t, dtype=float) - self.modal_age)
                   / self.dispersion)
            / self.dispersion
        )

    def cumulative_hazard(self, t):
        """Integral of the hazard from 0 to t (closed form)."""
        t = np.asarray(t, dtype=float)
        a0 = (self.base_age - self.modal_age) / self.dispersion
        return np.exp(a0 + t / self.dispersion) - np.exp(a0)

    def annual_q(self, age):
        """Death probability between integer ages ``age`` and ``age+1``,
        from exact hazard integration."""
        age = np.asarray(age, dtype=float)
        upper = np.exp((age + 1.0 - self.modal_age) / self.dispersion)
        lower = np.exp((age - self.modal_age) / self.dispersion)
        return 1.0 - np.exp(-(upper - lower))


@dataclass
class MortalityTable:
    """Annual death probabilities q_x(year); year-independent when
    ``years`` is None (one column)."""

    ages: np.ndarray
    q: np.ndarray
    years: np.ndarray | None = None
    source: str = "user-supplied"

    def __post_init__(self):
        self.ages = np.asarray(self.ages, dtype=int)
        self.q = np.asarray(self.q, dtype=float)
        if self.years is not None:
            self.years = np.asarray(self.years, dtype=int)
            if self.q.shape != (self.ages.size, self.years.size):
                raise DomainError("q must be (n_ages, n_years)")
        elif self.q.shape != (self.ages.size,):
            raise DomainError("q must have one entry per age")
        if np.any(self.q < 0) or np.any(self.q >= 1):
            raise DomainError("death probabilities must lie in [0, 1)")

    def q_at(self, age: int, year: int | None = None) -> float:
        idx = np.searchsorted(self.ages, age)
        if idx >= self.ages.size or self.ages[idx] != age:
            raise RangeError(f"age {age} not covered by the table")
        if self.years is None:
            return float(self.q[idx])
        if year is None:
            raise RangeError("table is year-dependent; a year is required")
        jdx = np.searchsorted(self.years, year)
        if jdx >= self.years.size or self.years[jdx] != year:
            raise RangeError(f"year {year} not covered by the table")
        return float(self.q[idx, jdx])

    def to_csv(self, path: str | Path) -> None:
        header = ["age"] + (
            ["q"] if self.years is None else [str(y) for y in self.years]
        )
        lines = [f"# source: {self.source}", ",".join(header)]
        body = self.q[:, np.newaxis] if self.years is None else self.q
        for age, row in zip(self.ages, body):
            lines.append(",".join([str(int(age))] + [f"{v:.12g}" for v in row]))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "MortalityTable":
        lines = [
            ln for ln in Path(path).read_text().splitlines()
            if ln.strip() and not ln.startswith("#")
        ]
        header = lines[0].split(",")
        if header[0].strip() != "age":
            raise RangeError(f"{path}: first column must be 'age'")
        rows = [ln.split(",") for ln in lines[1:]]
        ages = np.array([int(r[0]) for r in rows])
        data = np.array([[float(v) for v in r[1:]] for r in rows])
        if len(header) == 2 and header[1].strip() == "q":
            return cls(ages=ages, q=data[:, 0], source=str(path))
        years = np.array([int(h) for h in header[1:]])
        return cls(ages=ages, q=data, years=years, source=str(path))


def gompertz_to_table(law: GompertzLaw, max_age: int = 110) -> MortalityTable:
    """Tabulate annual death probabilities from base_age to max_age."""
    if max_age > 110 + 15:
        raise DomainError("max_age beyond the supported range")
    ages = np.arange(int(law.base_age), max_age + 1)
    return MortalityTable(
        ages=ages, q=law.annual_q(ages), source="gompertz-derived"
    )


def annualize_temperature(
    grid_years: np.ndarray,
    grid_values: np.ndarray,
    years,
    clamp_window: float = 0.0,
):
    """Linear interpolation of the 5-year temperature path to calendar
    years; exact at grid points. Years within ``clamp_window`` beyond an
    end are clamped to the end value, anything farther raises."""
    grid_years = np.asarray(grid_years, dtype=float)
    grid_values = np.asarray(grid_values, dtype=float)
    years_arr = np.asarray(years, dtype=float)
    lo, hi = grid_years[0], grid_years[-1]
    if np.any(years_arr < lo - clamp_window) or np.any(years_arr > hi + clamp_window):
        raise RangeError(
            f"requested years outside the covered range {lo:.0f}-{hi:.0f}"
        )
    out = np.interp(np.clip(years_arr, lo, hi), grid_years, grid_values)
    return float(out) if np.ndim(years) == 0 else out


def adjusted_q(q, t_at, fn: ExcessMortalityFn | None = None):
    """Climate-adjusted death probability min(q * (1 + delta(T)), 1)."""
    fn = fn or ExcessMortalityFn()
    return np.minimum(np.asarray(q, dtype=float) * (1.0 + fn(t_at)), 1.0)


def survival_probability(
    age: int,
    year: int,
    k: int,
    table: MortalityTable,
    temperature_of_year,
    fn: ExcessMortalityFn | None = None,
) -> float:
    """Probability a life aged ``age`` in ``year`` survives ``k`` years
    under the climate-adjusted table."""
    fn = fn or ExcessMortalityFn()
    p = 1.0
    for j in range(k):
        q = table.q_at(age + j, None if table.years is None else year + j)
        p *= 1.0 - adjusted_q(q, temperature_of_year(year + j), fn)
    return p


@dataclass
class CubicDamage:
    """Least-squares cubic fit of an annual mortality-damage path;
    coefficients are ascending in the time argument."""

    coeffs: np.ndarray
    max_abs_residual: float
    t0: float = 0.0

    def __call__(self, t):
        return np.polyval(self.coeffs[::-1], np.asarray(t, dtype=float) - self.t0)

    def derivative_coeffs(self, order: int) -> np.ndarray:
        c = np.polynomial.polynomial.polyder(self.coeffs, m=order)
        return np.pad(c, (0, len(self.coeffs) - len(c)))


def fit_cubic_damage(times, deltas, t0: float = 0.0) -> CubicDamage:
    """Fit delta(t) by a cubic polynomial in (t - t0), least squares."""
    times = np.asarray(times, dtype=float) - t0
    deltas = np.asarray(deltas, dtype=float)
    if times.size < 4:
        raise NumericError("cubic fit needs at least 4 points")
    try:
        coeffs_desc = np.polyfit(times, deltas, 3)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"cubic fit failed: {exc}") from None
    fitted = np.polyval(coeffs_desc, times)
    return CubicDamage(
        coeffs=coeffs_desc[::-1].copy(),
        max_abs_residual=float(np.max(np.abs(fitted - deltas))),
        t0=t0,
    )


def mortality_damage_path(
    grid_years: np.ndarray,
    t_at: np.ndarray,
    first_year: int = 2015,
    last_year: int = 2100,
    fn: ExcessMortalityFn | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Annual excess-mortality fractions implied by a temperature path."""
    fn = fn or ExcessMortalityFn()
    years = np.arange(first_year, last_year + 1)
    temps = annualize_temperature(grid_years, t_at, years)
    return years, fn(temps)
