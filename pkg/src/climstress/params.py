"""Model parameters and the flat key=value parameter file.

All numeric constants of the climate-economy core live in a versioned
parameter file (see ``data/dice2016.params``), never in code. Units are
fixed per field: capital in trillions of 2010 USD, carbon stocks in GtC,
temperatures in degC above 1900, emissions in GtCO2 per year, population
in billions, 5-year period grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError

#: sum tolerance for the carbon-transfer matrix column check
_COLSUM_TOL = 1e-12


def default_params_path() -> Path:
    return Path(resources.files("climstress").joinpath("data/dice2016.params"))


def _parse_value(text: str):
    text = text.strip()
    if text.startswith('"') and text.endswith('"') and len(text) >= 2:
        return text[1:-1]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse parameter value {text!r}") from None


def load_parameter_file(path: str | Path | None = None) -> dict:
    """Parse the flat key=value parameter file into a dict."""
    path = Path(path) if path is not None else default_params_path()
    if not path.exists():
        raise ConfigError(f"parameter file not found: {path}")
    raw: dict = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty parameter name")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate parameter {key!r}")
        raw[key] = _parse_value(value)
    return raw


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Constants of the 5-year-grid climate-economy core.

    ``phi_m`` acts on the carbon stock vector (M_AT, M_UP, M_LO) and is
    column-stochastic (mass moves between boxes, none is created).
    ``phi_t`` acts on (T_AT, T_LO). ``theta1_path`` is the per-period
    abatement-cost coefficient; it depends on the carbon-intensity path,
    so it stays unbound (None) until :func:`bind_theta1` is called.
    """

    alpha: float          # risk aversion exponent
    rho: float            # per-period utility discount factor
    prstp: float          # annual pure rate of time preference (generates rho)
    gamma: float          # capital elasticity
    delta_k: float        # annual capital depreciation rate
    theta2: float         # abatement cost exponent
    pi2: float            # damage coefficient per degC^2
    beta_co2: float       # CO2-to-carbon mass ratio
    m_at_preindustrial: float  # GtC
    eta: float            # forcing per CO2 doubling, W/m^2
    xi1: float            # temperature-forcing coupling
    phi_m: np.ndarray     # 3x3 carbon transfer matrix
    phi_t: np.ndarray     # 2x2 temperature transfer matrix
    delta_years: int      # period length, years
    n_periods: int        # horizon count (grid has n_periods+1 points)
    pback: float          # backstop price 2010 USD/tCO2 (theta1 generator)
    gback: float          # backstop price decline per period (theta1 generator)
    mu_max: float         # hard upper bound on the abatement control
    theta1_path: np.ndarray | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "phi_m", np.asarray(self.phi_m, dtype=float))
        object.__setattr__(self, "phi_t", np.asarray(self.phi_t, dtype=float))
        if self.theta1_path is not None:
            object.__setattr__(
                self, "theta1_path", np.asarray(self.theta1_path, dtype=float)
            )
        self.validate()

    def validate(self) -> None:
        if not (self.alpha > 0 and self.alpha != 1.0):
            raise DomainError(f"alpha must be > 0 and != 1, got {self.alpha}")
        if not 0.0 < self.rho < 1.0:
            raise DomainError(f"rho must lie in (0, 1), got {self.rho}")
        if abs((1.0 + self.prstp) ** (-self.delta_years) - self.rho) > 1e-9:
            raise ConfigError(
                "rho is inconsistent with prstp: expected "
                f"{(1.0 + self.prstp) ** (-self.delta_years)!r}, got {self.rho!r}"
            )
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.delta_years != 5:
            raise ConfigError("the period grid is 5-year; delta_years must be 5")
        if self.phi_m.shape != (3, 3):
            raise ConfigError("phi_m must be 3x3")
        if self.phi_t.shape != (2, 2):
            raise ConfigError("phi_t must be 2x2")
        colsums = self.phi_m.sum(axis=0)
        if np.any(np.abs(colsums - 1.0) > _COLSUM_TOL):
            raise ConfigError(
                f"phi_m columns must sum to 1 (carbon conservation), got {colsums}"
            )
        if self.theta1_path is not None:
            if self.theta1_path.shape != (self.n_periods + 1,):
                raise ConfigError(
                    f"theta1_path must have length {self.n_periods + 1}, "
                    f"got {self.theta1_path.shape}"
                )
            if np.any(self.theta1_path < 0):
                raise ConfigError("theta1_path entries must be >= 0")

    @property
    def optimal_longrun_savings(self) -> float:
        """DICE terminal savings rate, used to pin the last periods."""
        return (
            (self.delta_k + 0.004)
            / (self.delta_k + 0.004 * self.alpha + self.prstp)
            * self.gamma
        )

    @classmethod
    def from_mapping(cls, raw: dict) -> "ModelParams":
        phi_m = np.array(
            [[raw[f"phi_m_{i}{j}"] for j in (1, 2, 3)] for i in (1, 2, 3)]
        )
        phi_t = np.array([[raw[f"phi_t_{i}{j}"] for j in (1, 2)] for i in (1, 2)])
        try:
            return cls(
                alpha=raw["alpha"],
                rho=raw["rho"],
                prstp=raw["prstp"],
                gamma=raw["gamma"],
                delta_k=raw["delta_k"],
                theta2=raw["theta2"],
                pi2=raw["pi2"],
                beta_co2=raw["beta_co2"],
                m_at_preindustrial=raw["m_at_preindustrial"],
                eta=raw["eta"],
                xi1=raw["xi1"],
                phi_m=phi_m,
                phi_t=phi_t,
                delta_years=raw["delta_years"],
                n_periods=raw["n_periods"],
                pback=raw["pback"],
                gback=raw["gback"],
                mu_max=raw["mu_max"],
            )
        except KeyError as exc:
            raise ConfigError(f"parameter file missing key {exc}") from None

    @classmethod
    def load(cls, path: str | Path | None = None) -> "ModelParams":
        return cls.from_mapping(load_parameter_file(path))


def backstop_theta1(sigma: np.ndarray, params: ModelParams) -> np.ndarray:
    """Per-period abatement cost coefficient from the backstop price.

    theta1_t = pback * (1 - gback)^t * sigma_t / (1000 * theta2), with
    sigma in GtCO2 per trillion USD so the result is a fraction of output.
    """
    sigma = np.asarray(sigma, dtype=float)
    t = np.arange(sigma.shape[-1])
    return params.pback * (1.0 - params.gback) ** t * sigma / (1000.0 * params.theta2)


def bind_theta1(params: ModelParams, sigma: np.ndarray) -> ModelParams:
    """Return a copy of ``params`` with theta1_path generated from ``sigma``."""
    return replace(params, theta1_path=backstop_theta1(sigma, params))


@dataclass
class StateVector:
    """Model state at one period. L is carried even when population is
    exogenous so that a single state layout serves both modes."""

    K: float       # produced capital, trillions 2010 USD
    m_at: float    # atmospheric carbon, GtC
    m_up: float    # upper-ocean carbon, GtC
    m_lo: float    # lower-ocean carbon, GtC
    t_at: float    # atmospheric temperature anomaly, degC
    t_lo: float    # deep-ocean temperature anomaly, degC
    L: float       # population, billions

    def validate(self) -> None:
        if not (self.K > 0 and self.m_at > 0 and self.m_up > 0 and self.m_lo > 0):
            raise DomainError("K and carbon stocks must be positive")
        if self.L <= 0:
            raise DomainError("population must be positive")
        for name in ("t_at", "t_lo"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.K, self.m_at, self.m_up, self.m_lo, self.t_at, self.t_lo, self.L]
        )


@dataclass
class ControlVector:
    """Controls at one period: savings rate and abatement rate."""

    s: float
    mu: float

    def validate(self, mu_max: float = 1.2) -> None:
        if not 0.0 <= self.s <= 1.0:
            raise DomainError(f"savings rate must lie in [0, 1], got {self.s}")
        if not 0.0 <= self.mu <= mu_max:
            raise DomainError(f"mu must lie in [0, {mu_max}], got {self.mu}")


def initial_state(raw: dict) -> StateVector:
    """2015 initial state from the parameter file mapping."""
    try:
        return StateVector(
            K=raw["initial_k"],
            m_at=raw["initial_m_at"],
            m_up=raw["initial_m_up"],
            m_lo=raw["initial_m_lo"],
            t_at=raw["initial_t_at"],
            t_lo=raw["initial_t_lo"],
            L=raw["initial_population"],
        )
    except KeyError as exc:
        raise ConfigError(f"parameter file missing key {exc}") from None


def grid_years(params: ModelParams, start_year: int = 2015) -> np.ndarray:
    return start_year + params.delta_years * np.arange(params.n_periods + 1)
