"""SSP baseline ingestion and calibration of the exogenous paths.

Pipeline per (SSP, IAM) pair: parse the IIASA-style World export,
convert GDP to 2010 USD, resample to the 5-year grid, extend every
series past 2100 by log-linear trend (linear fallback for emission
series that cross zero), derive the carbon intensity, and back out the
TFP path by fixed-point iteration so the no-damage welfare-optimal
economy reproduces the baseline GDP.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import (
    CalibrationError,
    ConfigError,
    ExtrapolationError,
    IngestError,
    PriceBaseError,
    UnitError,
)
from .exogenous import ExogenousPaths, dice_fex_path
from .optimizer import (
    OptimizationProblem,
    SolverOptions,
    dice_savings_bounds,
    optimize_consumption,
)
from .params import ModelParams, StateVector, grid_years
from .scenario import ZERO_INDUSTRIAL, ControlSchedule

log = logging.getLogger(__name__)

GDP_2005_TO_2010_USD = 1.14  # US CPI growth 2005 -> 2010

MARKER_IAM = {
    "SSP1": "IMAGE",
    "SSP2": "MESSAGE-GLOBIOM",
    "SSP3": "AIM/CGE",
    "SSP4": "GCAM",
    "SSP5": "REMIND-MAgPIE",
}

KNOWN_MODELS = set(MARKER_IAM.values()) | {"WITCH-GLOBIOM"}

_MODEL_ALIASES = {
    "GCAM4": "GCAM",
    "REMIND-MAGPIE": "REMIND-MAgPIE",
    "MESSAGE-GLOBIOM": "MESSAGE-GLOBIOM",
    "AIM/CGE": "AIM/CGE",
    "AIM-CGE": "AIM/CGE",
    "WITCH-GLOBIOM": "WITCH-GLOBIOM",
    "IMAGE": "IMAGE",
}

VAR_POPULATION = "Population"
VAR_GDP = "GDP|PPP"
VAR_E_IND = "Emissions|CO2|Fossil Fuels and Industry"
VAR_E_LAND = "Emissions|CO2|Land Use"
REQUIRED_VARIABLES = (VAR_POPULATION, VAR_GDP, VAR_E_IND, VAR_E_LAND)

# target unit per variable and the accepted source units with scale factors
_UNIT_SCALES = {
    VAR_POPULATION: {"million": 1e-3, "billion": 1.0},
    VAR_GDP: {
        "billion us$2005/yr": 1e-3,
        "billion usd_2005/yr": 1e-3,
        "trillion us$2005/yr": 1.0,
    },
    VAR_E_IND: {"mt co2/yr": 1e-3, "gt co2/yr": 1.0},
    VAR_E_LAND: {"mt co2/yr": 1e-3, "gt co2/yr": 1.0},
}


@dataclass
class SspScenarioData:
    """World-level baseline series for one (IAM, SSP) pair on the
    2015..2100 5-year grid. Population in billions, GDP in trillions
    (price base tagged), emissions in GtCO2/yr."""

    model: str
    ssp: str
    marker: bool
    years: np.ndarray
    population: np.ndarray
    gdp: np.ndarray
    price_base: str
    e_ind: np.ndarray
    e_land: np.ndarray
    source: str = ""

    def __post_init__(self):
        for name in ("years", "population", "gdp", "e_ind", "e_land"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        self.validate()

    def validate(self) -> None:
        expected = np.arange(2015, 2101, 5)
        if not np.array_equal(self.years, expected):
            raise IngestError(
                f"{self.model}/{self.ssp}: grid must be 2015..2100 in 5-year steps"
            )
        for name in ("population", "gdp"):
            if np.any(getattr(self, name) <= 0):
                raise IngestError(f"{self.model}/{self.ssp}: {name} must be positive")
        if self.marker != (MARKER_IAM.get(self.ssp) == self.model):
            raise IngestError(
                f"{self.model}/{self.ssp}: marker flag inconsistent with the "
                "marker assignment"
            )

    @property
    def key(self) -> tuple[str, str]:
        return (self.model, self.ssp)


def _normalise_model(name: str) -> str:
    return _MODEL_ALIASES.get(name.strip().upper().replace(" ", ""), name.strip())


def _ssp_from_scenario(scenario: str) -> str | None:
    m = re.match(r"^\s*(SSP\d)\s*(?:-|_)?\s*(baseline)?\s*$", scenario, re.IGNORECASE)
    if not m:
        return None
    return m.group(1).upper()


def parse_ssp_export(path: str | Path) -> list[SspScenarioData]:
    """Parse a delimited SSP-database World export into scenario records.

    Expects columns Model, Scenario, Region, Variable, Unit plus year
    columns; non-World regions and non-baseline scenarios are ignored.
    Missing grid years are filled by linear interpolation between the
    reported years. Duplicate (model, ssp, variable) rows: last wins.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"input file not found: {path}")
    try:
        frame = pd.read_csv(path)
    except Exception as exc:
        raise IngestError(f"cannot parse {path}: {exc}") from None
    if frame.empty:
        raise IngestError(f"{path}: no rows")

    colmap = {c.lower().strip(): c for c in frame.columns}
    for required in ("model", "scenario", "region", "variable", "unit"):
        if required not in colmap:
            raise IngestError(f"{path}: missing column {required!r}")
    year_cols = [c for c in frame.columns if re.fullmatch(r"\d{4}", str(c).strip())]
    if not year_cols:
        raise IngestError(f"{path}: no year columns found")

    world = frame[frame[colmap["region"]].astype(str).str.strip().str.lower() == "world"]
    grid = np.arange(2015, 2101, 5)

    series: dict[tuple[str, str], dict[str, tuple[np.ndarray, np.ndarray, str]]] = {}
    for _, row in world.iterrows():
        ssp = _ssp_from_scenario(str(row[colmap["scenario"]]))
        if ssp is None:
            continue
        variable = str(row[colmap["variable"]]).strip()
        if variable not in REQUIRED_VARIABLES:
            continue
        model = _normalise_model(str(row[colmap["model"]]))
        unit = str(row[colmap["unit"]]).strip().lower()
        scales = _UNIT_SCALES[variable]
        if unit not in scales:
            raise UnitError(
                f"{path}: unknown unit {unit!r} for variable {variable!r}"
            )
        years, values = [], []
        for yc in year_cols:
            v = row[yc]
            if pd.notna(v):
                years.append(int(str(yc).strip()))
                values.append(float(v) * scales[unit])
        if not years:
            continue
        key = (model, ssp)
        if key in series and variable in series[key]:
            log.warning("%s: duplicate rows for %s/%s %s; last wins",
                        path.name, model, ssp, variable)
        series.setdefault(key, {})[variable] = (
            np.asarray(years, dtype=float),
            np.asarray(values, dtype=float),
            unit,
        )

    out = []
    for (model, ssp), variables in sorted(series.items()):
        missing = [v for v in REQUIRED_VARIABLES if v not in variables]
        if missing:
            raise IngestError(
                f"{path}: {model}/{ssp} is missing required variable(s) "
                + ", ".join(missing)
            )
        resampled = {}
        for variable in REQUIRED_VARIABLES:
            years, values, _ = variables[variable]
            order = np.argsort(years)
            years, values = years[order], values[order]
            if years[0] > grid[0] or years[-1] < grid[-1]:
                raise IngestError(
                    f"{path}: {model}/{ssp} {variable} covers {years[0]:.0f}-"
                    f"{years[-1]:.0f}, need 2015-2100"
                )
            resampled[variable] = np.interp(grid, years, values)
        out.append(
            SspScenarioData(
                model=model,
                ssp=ssp,
                marker=MARKER_IAM.get(ssp) == model,
                years=grid,
                population=resampled[VAR_POPULATION],
                gdp=resampled[VAR_GDP],
                price_base="2005USD",
                e_ind=resampled[VAR_E_IND],
                e_land=resampled[VAR_E_LAND],
                source=path.name,
            )
        )
    if not out:
        raise IngestError(f"{path}: no usable World baseline rows found")
    return out


def convert_price_base(data: SspScenarioData,
                       factor: float = GDP_2005_TO_2010_USD) -> SspScenarioData:
    """Convert GDP from 2005 USD to 2010 USD by the CPI factor."""
    if data.price_base == "2010USD":
        raise PriceBaseError(f"{data.model}/{data.ssp}: GDP already in 2010 USD")
    if data.price_base != "2005USD":
        raise PriceBaseError(f"unknown price base {data.price_base!r}")
    return replace(data, gdp=data.gdp * factor, price_base="2010USD")


def extrapolate_loglinear(
    years: np.ndarray,
    values: np.ndarray,
    target_years: np.ndarray,
    window: float = 50.0,
) -> np.ndarray:
    """Extend a positive series by the log-linear trend of the trailing
    fitting window, anchored at the last data value (continuous)."""
    years = np.asarray(years, dtype=float)
    values = np.asarray(values, dtype=float)
    last = years[-1]
    mask = years >= last - window
    if np.any(values[mask] <= 0):
        raise ExtrapolationError(
            "log-linear extrapolation needs positive values in the fitting window"
        )
    slope = np.polyfit(years[mask], np.log(values[mask]), 1)[0]
    target_years = np.asarray(target_years, dtype=float)
    out = np.empty_like(target_years)
    inside = target_years <= last
    out[inside] = np.interp(target_years[inside], years, values)
    out[~inside] = values[-1] * np.exp(slope * (target_years[~inside] - last))
    return out


def extrapolate_linear(
    years: np.ndarray,
    values: np.ndarray,
    target_years: np.ndarray,
    window: float = 50.0,
    floor: float | None = None,
) -> np.ndarray:
    """Linear-trend extension for series that reach zero or negative
    values (land-use emissions under sustainability scenarios)."""
    years = np.asarray(years, dtype=float)
    values = np.asarray(values, dtype=float)
    last = years[-1]
    mask = years >= last - window
    slope = np.polyfit(years[mask], values[mask], 1)[0]
    target_years = np.asarray(target_years, dtype=float)
    out = np.empty_like(target_years)
    inside = target_years <= last
    out[inside] = np.interp(target_years[inside], years, values)
    out[~inside] = values[-1] + slope * (target_years[~inside] - last)
    if floor is not None:
        out = np.maximum(out, floor)
    return out


def extend_series(
    years: np.ndarray,
    values: np.ndarray,
    target_years: np.ndarray,
    window: float = 50.0,
    is_emission: bool = False,
    floor: float | None = None,
) -> np.ndarray:
    """Log-linear extension, falling back to a floored linear trend for
    emission series whose fitting window touches zero or negative."""
    try:
        return extrapolate_loglinear(years, values, target_years, window)
    except ExtrapolationError:
        if not is_emission:
            raise
        return extrapolate_linear(years, values, target_years, window, floor)


def carbon_intensity(e_ind: np.ndarray, gdp: np.ndarray,
                     years_e: np.ndarray | None = None,
                     years_gdp: np.ndarray | None = None) -> np.ndarray:
    """sigma_t = industrial emissions / gross GDP, elementwise."""
    if years_e is not None and years_gdp is not None and not np.array_equal(
        years_e, years_gdp
    ):
        raise CalibrationError("emission and GDP grids are misaligned")
    e_ind = np.asarray(e_ind, dtype=float)
    gdp = np.asarray(gdp, dtype=float)
    if e_ind.shape != gdp.shape:
        raise CalibrationError("emission and GDP grids are misaligned")
    if np.any(gdp <= 0):
        raise CalibrationError("GDP must be positive to form the carbon intensity")
    return e_ind / gdp


@dataclass
class CalibrationReport:
    iterations: int
    max_residual: float
    tol: float
    converged: bool
    residual_history: list


def calibrate_tfp(
    y_hat: np.ndarray,
    l_hat: np.ndarray,
    params: ModelParams,
    raw: dict,
    k_init: np.ndarray,
    tol: float = 1e-3,
    max_iter: int = 25,
    residual_through_index: int | None = None,
) -> tuple[np.ndarray, CalibrationReport]:
    """Fixed-point TFP calibration.

    Iterates A_t = y_hat_t / (K_t^gamma * l_hat_t^(1-gamma)) against the
    welfare-optimal no-damage, no-abatement economy until the simulated
    gross output matches y_hat within ``tol`` (max relative deviation
    through the residual horizon, default 2100).
    """
    n = params.n_periods + 1
    y_hat = np.asarray(y_hat, dtype=float)
    l_hat = np.asarray(l_hat, dtype=float)
    k_init = np.asarray(k_init, dtype=float)
    for name, arr in (("y_hat", y_hat), ("l_hat", l_hat), ("k_init", k_init)):
        if arr.shape != (n,):
            raise CalibrationError(f"{name} must cover the full horizon ({n} points)")
    if tol <= 0:
        raise CalibrationError("tol must be positive")
    if residual_through_index is None:
        residual_through_index = int(np.searchsorted(grid_years(params), 2100))
    sl = slice(0, residual_through_index + 1)

    nodmg = replace(params, pi2=0.0, theta1_path=np.zeros(n))
    zero_schedule = ControlSchedule(
        kind=ZERO_INDUSTRIAL, target_year=None, years=grid_years(params),
        values=np.zeros(n),
    )
    bounds = dice_savings_bounds(params, raw)
    init = StateVector(
        K=raw["initial_k"], m_at=raw["initial_m_at"], m_up=raw["initial_m_up"],
        m_lo=raw["initial_m_lo"], t_at=raw["initial_t_at"], t_lo=raw["initial_t_lo"],
        L=float(l_hat[0]),
    )

    K = k_init.copy()
    s_warm = None
    history: list[float] = []
    A = None
    for iteration in range(1, max_iter + 1):
        A = y_hat / (K**params.gamma * l_hat ** (1.0 - params.gamma))
        exog = ExogenousPaths(
            years=grid_years(params), L=l_hat, A=A,
            sigma=np.zeros(n), e_land=np.zeros(n), f_ex=np.zeros(n),
        )
        problem = OptimizationProblem(
            params=nodmg, exog=exog, schedule=zero_schedule, initial_state=init,
            s_bounds=bounds, s_init=s_warm,
            options=SolverOptions(),
        )
        run = optimize_consumption(problem)
        K = run.trajectory.K
        s_warm = run.trajectory.s
        y_sim = run.trajectory.y_gross
        residual = float(np.max(np.abs(y_sim[sl] - y_hat[sl]) / y_hat[sl]))
        history.append(residual)
        if residual <= tol:
            return A, CalibrationReport(
                iterations=iteration, max_residual=residual, tol=tol,
                converged=True, residual_history=history,
            )
    raise CalibrationError(
        f"TFP calibration did not reach tol={tol} in {max_iter} iterations "
        f"(last residual {history[-1]:.3e})",
        residuals=history,
    )


#: default floor for extended land-use emissions, GtCO2/yr; linear
#: extension of strong afforestation sinks would otherwise exhaust the
#: atmospheric carbon stock centuries out
LAND_USE_FLOOR_GTCO2 = -5.0


def build_exogenous(
    data: SspScenarioData,
    params: ModelParams,
    raw: dict,
    k_init: np.ndarray,
    tol: float = 1e-3,
    max_iter: int = 25,
    window: float = 50.0,
    land_floor: float | None = LAND_USE_FLOOR_GTCO2,
) -> tuple[ExogenousPaths, CalibrationReport]:
    """Full calibration of one (SSP, IAM) pair to DICE exogenous paths."""
    if data.price_base == "2005USD":
        data = convert_price_base(data)
    full_years = grid_years(params)

    l_hat = extend_series(data.years, data.population, full_years, window)
    y_hat = extend_series(data.years, data.gdp, full_years, window)
    e_ind_hat = extend_series(
        data.years, data.e_ind, full_years, window, is_emission=True
    )
    e_land_hat = extend_series(
        data.years, data.e_land, full_years, window, is_emission=True,
        floor=land_floor,
    )
    sigma = carbon_intensity(e_ind_hat, y_hat)
    f_ex = dice_fex_path(raw, params.n_periods)

    A, report = calibrate_tfp(
        y_hat, l_hat, params, raw, k_init, tol=tol, max_iter=max_iter
    )
    paths = ExogenousPaths(
        years=full_years, L=l_hat, A=A, sigma=sigma, e_land=e_land_hat, f_ex=f_ex,
        meta={
            "model": data.model,
            "ssp": data.ssp,
            "marker": data.marker,
            "source": data.source,
            "gdp_variable": VAR_GDP,
            "price_base": "2010USD",
            "price_conversion": GDP_2005_TO_2010_USD,
            "extrapolation_window_years": window,
            "calibration": {
                "tol": report.tol,
                "iterations": report.iterations,
                "max_residual": report.max_residual,
                "k_init": "dice2016-reference",
            },
        },
    )
    return paths, report


# --- ingested-store persistence -------------------------------------------


def store_hash(paths: list[str | Path]) -> str:
    digest = hashlib.sha256()
    for p in sorted(str(p) for p in paths):
        digest.update(Path(p).read_bytes())
    return digest.hexdigest()


def save_store(scenarios: list[SspScenarioData], path: str | Path,
               source_hash: str = "") -> None:
    payload = {
        "format_version": 1,
        "source_hash": source_hash,
        "scenarios": [
            {
                "model": s.model,
                "ssp": s.ssp,
                "marker": s.marker,
                "years": s.years.tolist(),
                "population_billion": s.population.tolist(),
                "gdp_trillion": s.gdp.tolist(),
                "price_base": s.price_base,
                "e_ind_gtco2": s.e_ind.tolist(),
                "e_land_gtco2": s.e_land.tolist(),
                "source": s.source,
            }
            for s in scenarios
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True))


def load_store(path: str | Path) -> list[SspScenarioData]:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestError(f"cannot read scenario store {path}: {exc}") from None
    return [
        SspScenarioData(
            model=s["model"],
            ssp=s["ssp"],
            marker=s["marker"],
            years=s["years"],
            population=s["population_billion"],
            gdp=s["gdp_trillion"],
            price_base=s["price_base"],
            e_ind=s["e_ind_gtco2"],
            e_land=s["e_land_gtco2"],
            source=s.get("source", ""),
        )
        for s in payload["scenarios"]
    ]


def select_scenario(
    scenarios: list[SspScenarioData], ssp: str, model: str
) -> SspScenarioData:
    model = _normalise_model(model)
    for s in scenarios:
        if s.ssp == ssp.upper() and s.model == model:
            return s
    available = ", ".join(f"{s.model}/{s.ssp}" for s in scenarios)
    raise ConfigError(f"scenario {model}/{ssp} not in store (have: {available})")
