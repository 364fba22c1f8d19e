"""Exogenous path container and the native DICE-2016 path generators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError
from .params import ModelParams, backstop_theta1, grid_years


@dataclass
class ExogenousPaths:
    """Time-indexed exogenous inputs on the 5-year grid.

    L in billions, A dimensionless TFP, sigma in GtCO2 per trillion USD,
    e_land in GtCO2/yr, f_ex in W/m^2. All arrays have n_periods+1 entries.
    """

    years: np.ndarray
    L: np.ndarray
    A: np.ndarray
    sigma: np.ndarray
    e_land: np.ndarray
    f_ex: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("years", "L", "A", "sigma", "e_land", "f_ex"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        self.validate()

    def validate(self) -> None:
        n = self.years.shape[0]
        for name in ("L", "A", "sigma", "e_land", "f_ex"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise ConfigError(f"{name} length {arr.shape} != grid length {n}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} contains non-finite values")
        if np.any(self.L <= 0):
            raise DomainError("population path must be positive")
        if np.any(self.A <= 0):
            raise DomainError("TFP path must be positive")
        if np.any(self.sigma < 0):
            raise DomainError("carbon intensity path must be >= 0")

    def index_of_year(self, year: int) -> int:
        idx = np.searchsorted(self.years, year)
        if idx >= len(self.years) or self.years[idx] != year:
            raise ConfigError(f"year {year} not on the 5-year grid")
        return int(idx)

    def save(self, path: str | Path) -> None:
        payload = {
            "format_version": 1,
            "meta": self.meta,
            "columns": {
                "year": self.years.tolist(),
                "population_billion": self.L.tolist(),
                "tfp": self.A.tolist(),
                "sigma_gtco2_per_trillion_usd": self.sigma.tolist(),
                "e_land_gtco2": self.e_land.tolist(),
                "f_ex_wm2": self.f_ex.tolist(),
            },
        }
        Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "ExogenousPaths":
        payload = json.loads(Path(path).read_text())
        cols = payload["columns"]
        return cls(
            years=cols["year"],
            L=cols["population_billion"],
            A=cols["tfp"],
            sigma=cols["sigma_gtco2_per_trillion_usd"],
            e_land=cols["e_land_gtco2"],
            f_ex=cols["f_ex_wm2"],
            meta=payload.get("meta", {}),
        )


def dice_fex_path(raw: dict, n_periods: int) -> np.ndarray:
    """Non-CO2 forcing: linear ramp to the 2100 value, flat afterwards."""
    f0 = raw["dice_fex_initial"]
    f1 = raw["dice_fex_final"]
    ramp = raw["dice_fex_ramp_periods"]
    t = np.arange(n_periods + 1)
    return f0 + (f1 - f0) * np.minimum(t, ramp) / ramp


def dice_native_paths(raw: dict, params: ModelParams) -> ExogenousPaths:
    """Exogenous paths of the original DICE-2016 parameterisation."""
    n = params.n_periods
    years = grid_years(params)

    L = np.empty(n + 1)
    L[0] = raw["initial_population"]
    asym = raw["dice_population_asymptote"]
    adj = raw["dice_population_adjustment"]
    for i in range(n):
        L[i + 1] = L[i] * (asym / L[i]) ** adj

    A = np.empty(n + 1)
    A[0] = raw["dice_tfp_initial"]
    ga = raw["dice_tfp_growth_initial"] * np.exp(
        -raw["dice_tfp_growth_decline"] * params.delta_years * np.arange(n + 1)
    )
    for i in range(n):
        A[i + 1] = A[i] / (1.0 - ga[i])

    sigma = np.empty(n + 1)
    sigma[0] = raw["dice_emissions_industrial_initial"] / (
        raw["dice_gross_output_initial"] * (1.0 - raw["dice_mu_initial"])
    )
    gsig = raw["dice_sigma_growth_initial"] * (
        1.0 + raw["dice_sigma_growth_decline"]
    ) ** (params.delta_years * np.arange(n + 1))
    for i in range(n):
        sigma[i + 1] = sigma[i] * np.exp(gsig[i] * params.delta_years)

    e_land = raw["dice_eland_initial"] * (1.0 - raw["dice_eland_decline"]) ** np.arange(
        n + 1
    )
    f_ex = dice_fex_path(raw, n)

    return ExogenousPaths(
        years=years,
        L=L,
        A=A,
        sigma=sigma,
        e_land=e_land,
        f_ex=f_ex,
        meta={"source": "dice-2016r native parameterisation"},
    )


def dice_theta1(raw: dict, params: ModelParams) -> np.ndarray:
    return backstop_theta1(dice_native_paths(raw, params).sigma, params)
