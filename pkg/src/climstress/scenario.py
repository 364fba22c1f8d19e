"""Emission-control schedules and the net-zero re-parameterisation.

Net-zero schedules drive the *total* (industrial + land-use) emission to
zero through a re-parameterised control mu_tilde; zero-industrial
schedules ramp the plain industrial control mu. Ramps are linear in
calendar years, sampled on the 5-year grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError

NET_ZERO = "netzero"
ZERO_INDUSTRIAL = "zeroind"
FULLY_OPTIMAL = "fully-optimal"
ORIGINAL_DICE = "original-dice"  # fully-optimal on the native DICE inputs


@dataclass(frozen=True)
class ControlSchedule:
    """A named emission-control path on the grid (values absent when the
    control is optimised)."""

    kind: str
    target_year: int | None
    years: np.ndarray | None = None
    values: np.ndarray | None = None

    @property
    def reparameterised(self) -> bool:
        return self.kind == NET_ZERO

    @property
    def label(self) -> str:
        if self.kind == FULLY_OPTIMAL:
            return FULLY_OPTIMAL
        return f"{self.kind}@{self.target_year}"


def ramp_schedule(
    kind: str, target_year: int, grid_years: np.ndarray, start_year: int = 2015
) -> ControlSchedule:
    """Linear 0-to-1 ramp from start_year to target_year, 1 afterwards."""
    if kind not in (NET_ZERO, ZERO_INDUSTRIAL):
        raise ConfigError(f"unknown ramp kind {kind!r}")
    if target_year <= start_year:
        raise ConfigError(
            f"ramp target year {target_year} must exceed start year {start_year}"
        )
    grid_years = np.asarray(grid_years)
    frac = (grid_years - start_year) / (target_year - start_year)
    values = np.clip(frac, 0.0, 1.0)
    # exactness at the endpoints is part of the contract
    values[grid_years <= start_year] = 0.0
    values[grid_years >= target_year] = 1.0
    return ControlSchedule(
        kind=kind, target_year=target_year, years=grid_years, values=values
    )


def fully_optimal_schedule() -> ControlSchedule:
    return ControlSchedule(kind=FULLY_OPTIMAL, target_year=None)


def parse_schedule_id(spec: str, grid_years: np.ndarray) -> ControlSchedule:
    """Parse identifiers like ``netzero@2050`` or ``fully-optimal``."""
    spec = spec.strip().lower()
    if spec in (FULLY_OPTIMAL, ORIGINAL_DICE):
        return fully_optimal_schedule()
    if "@" not in spec:
        raise ConfigError(f"bad schedule id {spec!r}; expected e.g. 'netzero@2050'")
    kind, _, year = spec.partition("@")
    if kind not in (NET_ZERO, ZERO_INDUSTRIAL):
        raise ConfigError(f"unknown schedule kind {kind!r}")
    try:
        target = int(year)
    except ValueError:
        raise ConfigError(f"bad target year in schedule id {spec!r}") from None
    return ramp_schedule(kind, target, grid_years)


def mu_from_mu_tilde(mu_tilde, sigma, Y, e_land):
    """Translate the total-emission control into the industrial control.

    mu = mu_tilde * (1 + e_land / (sigma * Y)); with this mu the total
    emission (1-mu)*sigma*Y + e_land equals (1-mu_tilde)*(sigma*Y+e_land).
    """
    sy = np.asarray(sigma, dtype=float) * np.asarray(Y, dtype=float)
    if np.any(sy <= 0):
        raise NumericError(
            "degenerate economy: sigma*Y must be positive to re-parameterise"
        )
    return mu_tilde * (1.0 + np.asarray(e_land, dtype=float) / sy)


def mu_tilde_from_mu(mu, sigma, Y, e_land):
    """Inverse of :func:`mu_from_mu_tilde`."""
    sy = np.asarray(sigma, dtype=float) * np.asarray(Y, dtype=float)
    if np.any(sy <= 0):
        raise NumericError(
            "degenerate economy: sigma*Y must be positive to re-parameterise"
        )
    denom = 1.0 + np.asarray(e_land, dtype=float) / sy
    return mu / denom
