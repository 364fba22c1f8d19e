"""Scenario orchestration: calibrate, schedule, optimise, SCC, mortality.

A run cell is one (SSP, IAM, schedule) triple or the original-DICE
reference. Artifacts land in one directory per cell (trajectory.csv
with the SCC column, mortality.csv, diagnostics.json, meta.json) keyed
by a content hash of inputs and configuration, so re-running a matrix
skips completed cells.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import pandas as pd

from . import calibration as cal
from .errors import ClimstressError, ConfigError
from .exogenous import ExogenousPaths, dice_native_paths
from .mortality import ExcessMortalityFn, mortality_damage_path
from .optimizer import (
    OptimizationProblem,
    ScenarioRun,
    SolverOptions,
    dice_mu_bounds,
    dice_savings_bounds,
    optimize_consumption,
    optimize_full,
)
from .params import ModelParams, bind_theta1, initial_state, load_parameter_file
from .reference import reference_capital_path
from .scc import scc_grid
from .scenario import FULLY_OPTIMAL, ORIGINAL_DICE, parse_schedule_id
from .simulate import PopulationExtension

log = logging.getLogger(__name__)

SCHEDULE_IDS = ("netzero@2050", "netzero@2100", "zeroind@2050", "zeroind@2100")


@dataclass
class RunConfig:
    """One scenario cell plus the knobs shared across the pipeline."""

    scenario: str                      # "SSP2/MESSAGE-GLOBIOM/netzero@2050" or "original-dice"
    data_path: str | None = None       # SSP export csv or ingested store json
    params_path: str | None = None
    out_dir: str | None = None
    seed: int = 20240801
    calibration_tol: float = 1e-3
    solver: SolverOptions = field(default_factory=SolverOptions)
    population_extension: bool = False
    crude_death_rate: float = 0.0078   # annual deaths per capita, population mode
    mu_reparam_cap: float = 20.0
    scc_through_year: int = 2100
    scc_pulse_gtco2: float = 1.0
    cache: bool = True

    @property
    def is_original_dice(self) -> bool:
        return self.scenario.strip().lower() == ORIGINAL_DICE

    def parts(self) -> tuple[str, str, str]:
        # IAM names may contain '/', so take the first and last segments
        bits = self.scenario.split("/")
        if len(bits) < 3:
            raise ConfigError(
                f"scenario must be 'SSPx/IAM/schedule' or 'original-dice', "
                f"got {self.scenario!r}"
            )
        return (
            bits[0].strip().upper(),
            "/".join(bits[1:-1]).strip(),
            bits[-1].strip().lower(),
        )

    @property
    def cell_label(self) -> str:
        if self.is_original_dice:
            return ORIGINAL_DICE
        ssp, iam, schedule = self.parts()
        safe_iam = iam.replace("/", "-")
        return f"{ssp}_{safe_iam}_{schedule.replace('@', '-')}"


@dataclass
class CellResult:
    label: str
    run: ScenarioRun
    problem: OptimizationProblem
    scc: dict
    mortality_years: np.ndarray
    mortality_delta: np.ndarray
    artifact_dir: Path | None = None
    cached: bool = False

    def t_at_2100(self) -> float:
        return self.run.trajectory.value_at_year("t_at", 2100)

    def scc_at(self, year: int) -> float:
        idx = int(np.searchsorted(self.scc["years"], year))
        return float(self.scc["scc_usd_per_tco2"][idx])


def _file_digest(path: str | Path | None) -> str:
    if path is None:
        return "none"
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def config_hash(config: RunConfig) -> str:
    payload = {
        "scenario": config.scenario.lower(),
        "data": _file_digest(config.data_path),
        "params": _file_digest(config.params_path),
        "tol": config.calibration_tol,
        "population_extension": config.population_extension,
        "crude_death_rate": config.crude_death_rate,
        "mu_reparam_cap": config.mu_reparam_cap,
        "scc_through_year": config.scc_through_year,
        "scc_pulse": config.scc_pulse_gtco2,
        "solver": [config.solver.gtol, config.solver.ftol, config.solver.maxiter,
                   config.solver.fd_step],
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def load_scenarios(data_path: str | Path) -> list[cal.SspScenarioData]:
    data_path = Path(data_path)
    if data_path.suffix.lower() == ".json":
        return cal.load_store(data_path)
    return cal.parse_ssp_export(data_path)


# in-process caches; cells are pure functions of (inputs, config)
_CALIBRATION_CACHE: dict = {}


def calibrated_paths(
    data_path: str | Path,
    ssp: str,
    iam: str,
    params: ModelParams,
    raw: dict,
    tol: float,
    cache_dir: Path | None = None,
) -> ExogenousPaths:
    key = (str(data_path), _file_digest(data_path), ssp.upper(),
           cal._normalise_model(iam), tol)
    if key in _CALIBRATION_CACHE:
        return _CALIBRATION_CACHE[key]
    disk_key = hashlib.sha256(json.dumps(key).encode()).hexdigest()[:16]
    if cache_dir is not None:
        cached = cache_dir / f"calibration_{key[2]}_{key[3].replace('/', '-')}_{disk_key}.json"
        if cached.exists():
            paths = ExogenousPaths.load(cached)
            _CALIBRATION_CACHE[key] = paths
            return paths
    scenarios = load_scenarios(data_path)
    data = cal.select_scenario(scenarios, ssp, iam)
    paths, _report = cal.build_exogenous(
        data, params, raw, k_init=reference_capital_path(params), tol=tol
    )
    paths.meta["source_hash"] = _file_digest(data_path)
    _CALIBRATION_CACHE[key] = paths
    if cache_dir is not None:
        cache_dir.mkdir(parents=True, exist_ok=True)
        # atomic publish so parallel workers never see a partial file
        tmp = cached.with_suffix(f".tmp{os.getpid()}")
        paths.save(tmp)
        os.replace(tmp, cached)
    return paths


def _population_extension(
    exog: ExogenousPaths, params: ModelParams, crude_death_rate: float
) -> PopulationExtension:
    growth = np.ones(params.n_periods + 1)
    growth[:-1] = exog.L[1:] / exog.L[:-1]
    deaths = crude_death_rate * exog.L * params.delta_years
    return PopulationExtension(
        growth_factor=growth, deaths=deaths, excess_mortality=ExcessMortalityFn()
    )


def run_scenario(config: RunConfig) -> CellResult:
    """Execute one cell: solve, SCC, mortality, persist."""
    raw = load_parameter_file(config.params_path)
    params = ModelParams.from_mapping(raw)
    out_dir = Path(config.out_dir) if config.out_dir else None

    if out_dir is not None and config.cache:
        cell_dir = out_dir / config.cell_label
        meta_file = cell_dir / "meta.json"
        if meta_file.exists():
            try:
                meta = json.loads(meta_file.read_text())
            except json.JSONDecodeError:
                meta = {}
            if meta.get("config_hash") == config_hash(config):
                return _load_cell(config, cell_dir, params, raw)

    try:
        if config.is_original_dice:
            exog = dice_native_paths(raw, params)
            bound = bind_theta1(params, exog.sigma)
            problem = OptimizationProblem(
                params=bound, exog=exog, schedule=parse_schedule_id(
                    FULLY_OPTIMAL, exog.years
                ),
                initial_state=initial_state(raw),
                s_bounds=dice_savings_bounds(bound, raw),
                mu_bounds=dice_mu_bounds(bound, raw),
                mu_reparam_cap=config.mu_reparam_cap,
                options=config.solver,
            )
            run = optimize_full(problem)
        else:
            ssp, iam, schedule_id = config.parts()
            if config.data_path is None:
                raise ConfigError("SSP scenarios need a data_path")
            exog = calibrated_paths(
                config.data_path, ssp, iam, params, raw, config.calibration_tol,
                cache_dir=out_dir / "calibrations" if out_dir else None,
            )
            bound = bind_theta1(params, exog.sigma)
            schedule = parse_schedule_id(schedule_id, exog.years)
            if schedule.kind == FULLY_OPTIMAL:
                raise ConfigError(
                    "fully-optimal SSP cells are not part of the scenario matrix; "
                    "use a netzero/zeroind schedule or original-dice"
                )
            init = initial_state(raw)
            init = replace(init, L=float(exog.L[0]))
            population = (
                _population_extension(exog, bound, config.crude_death_rate)
                if config.population_extension
                else None
            )
            problem = OptimizationProblem(
                params=bound, exog=exog, schedule=schedule, initial_state=init,
                s_bounds=dice_savings_bounds(bound, raw),
                mu_reparam_cap=config.mu_reparam_cap,
                population=population,
                options=config.solver,
            )
            run = optimize_consumption(problem)

        scc = scc_grid(
            run, problem, through_year=config.scc_through_year,
            pulse_size=config.scc_pulse_gtco2,
        )
        years, delta = mortality_damage_path(
            run.trajectory.years, run.trajectory.t_at
        )
        result = CellResult(
            label=config.cell_label, run=run, problem=problem, scc=scc,
            mortality_years=years, mortality_delta=delta,
        )
    except ClimstressError as exc:
        raise type(exc)(f"[{config.cell_label}] {exc}") from exc

    if out_dir is not None:
        result.artifact_dir = _persist_cell(config, result)
    return result


def _trajectory_frame(result: CellResult) -> pd.DataFrame:
    tr = result.run.trajectory
    frame = pd.DataFrame(
        {
            "year": tr.years.astype(int),
            "s": tr.s,
            "mu": tr.mu,
            "K": tr.K,
            "m_at": tr.m_at,
            "m_up": tr.m_up,
            "m_lo": tr.m_lo,
            "t_at": tr.t_at,
            "t_lo": tr.t_lo,
            "L": tr.L,
            "y_gross": tr.y_gross,
            "omega": tr.omega,
            "q_net": tr.q_net,
            "C": tr.C,
            "e_ind": tr.e_ind,
            "e_land": tr.e_land,
            "e_total": tr.e_total,
            "forcing": tr.forcing,
            "scc_usd_per_tco2": result.scc["scc_usd_per_tco2"],
        }
    )
    if tr.mu_tilde is not None:
        frame["mu_tilde"] = tr.mu_tilde
    return frame


def _persist_cell(config: RunConfig, result: CellResult) -> Path:
    cell_dir = Path(config.out_dir) / config.cell_label
    cell_dir.mkdir(parents=True, exist_ok=True)
    _trajectory_frame(result).to_csv(
        cell_dir / "trajectory.csv", index=False, float_format="%.12g"
    )
    pd.DataFrame(
        {"year": result.mortality_years, "excess_mortality": result.mortality_delta}
    ).to_csv(cell_dir / "mortality.csv", index=False, float_format="%.12g")
    (cell_dir / "diagnostics.json").write_text(
        json.dumps(result.run.diagnostics, indent=1, sort_keys=True)
    )
    from . import __version__

    meta = {
        "cell": config.cell_label,
        "scenario": config.scenario,
        "config_hash": config_hash(config),
        "welfare": result.run.welfare,
        "exog_meta": getattr(result.problem.exog, "meta", {}),
        "scc_pulse_gtco2": config.scc_pulse_gtco2,
        "code_version": __version__,
        "inputs": {
            "data": _file_digest(config.data_path),
            "params": _file_digest(config.params_path),
        },
    }
    (cell_dir / "meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True))
    return cell_dir


def _load_cell(config: RunConfig, cell_dir: Path, params: ModelParams,
               raw: dict) -> CellResult:
    """Rehydrate a cached cell (enough for summaries and stress tests)."""
    frame = pd.read_csv(cell_dir / "trajectory.csv")
    mort = pd.read_csv(cell_dir / "mortality.csv")
    diagnostics = json.loads((cell_dir / "diagnostics.json").read_text())

    from .simulate import Trajectory

    tr = Trajectory(
        years=frame["year"].to_numpy(dtype=float),
        s=frame["s"].to_numpy(),
        mu=frame["mu"].to_numpy(),
        mu_tilde=frame["mu_tilde"].to_numpy() if "mu_tilde" in frame else None,
        K=frame["K"].to_numpy(),
        m_at=frame["m_at"].to_numpy(),
        m_up=frame["m_up"].to_numpy(),
        m_lo=frame["m_lo"].to_numpy(),
        t_at=frame["t_at"].to_numpy(),
        t_lo=frame["t_lo"].to_numpy(),
        L=frame["L"].to_numpy(),
        y_gross=frame["y_gross"].to_numpy(),
        omega=frame["omega"].to_numpy(),
        q_net=frame["q_net"].to_numpy(),
        C=frame["C"].to_numpy(),
        e_ind=frame["e_ind"].to_numpy(),
        e_land=frame["e_land"].to_numpy(),
        e_total=frame["e_total"].to_numpy(),
        forcing=frame["forcing"].to_numpy(),
        welfare=float(json.loads((cell_dir / "meta.json").read_text())["welfare"]),
    )
    run = ScenarioRun(
        trajectory=tr,
        schedule_label=config.scenario,
        welfare=tr.welfare,
        diagnostics=diagnostics,
    )
    scc = {
        "years": tr.years.copy(),
        "scc_usd_per_tco2": frame["scc_usd_per_tco2"].to_numpy(),
        "pulse_size": config.scc_pulse_gtco2,
    }
    return CellResult(
        label=config.cell_label, run=run, problem=None, scc=scc,
        mortality_years=mort["year"].to_numpy(),
        mortality_delta=mort["excess_mortality"].to_numpy(),
        artifact_dir=cell_dir, cached=True,
    )


def _run_cell_worker(config: RunConfig):
    try:
        result = run_scenario(config)
        return config.cell_label, result, None
    except ClimstressError as exc:
        return config.cell_label, None, str(exc)


def run_matrix(configs: list[RunConfig], jobs: int = 1) -> dict:
    """Run many cells, tolerating individual failures.

    Returns {label: CellResult} plus a {label: reason} failure map.
    """
    results: dict = {}
    failures: dict = {}
    if jobs <= 1:
        for config in configs:
            label, result, error = _run_cell_worker(config)
            if error is None:
                results[label] = result
            else:
                failures[label] = error
                log.warning("cell %s failed: %s", label, error)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for label, result, error in pool.map(_run_cell_worker, configs):
                if error is None:
                    results[label] = result
                else:
                    failures[label] = error
                    log.warning("cell %s failed: %s", label, error)
    return {"results": results, "failures": failures}


def marker_configs(data_path: str, out_dir: str | None = None,
                   schedules=SCHEDULE_IDS, **overrides) -> list[RunConfig]:
    return [
        RunConfig(
            scenario=f"{ssp}/{iam}/{schedule}", data_path=data_path,
            out_dir=out_dir, **overrides,
        )
        for ssp, iam in cal.MARKER_IAM.items()
        for schedule in schedules
    ]


NONMARKER_IAMS = ("AIM/CGE", "GCAM", "IMAGE", "WITCH-GLOBIOM")


def nonmarker_configs(data_path: str, out_dir: str | None = None,
                      schedules=SCHEDULE_IDS, **overrides) -> list[RunConfig]:
    return [
        RunConfig(
            scenario=f"SSP{i}/{iam}/{schedule}", data_path=data_path,
            out_dir=out_dir, **overrides,
        )
        for iam in NONMARKER_IAMS
        for i in range(1, 6)
        for schedule in schedules
    ]


def temperature_summary(results: dict, year: int = 2100) -> pd.DataFrame:
    """Long-form table of end-of-century temperatures per cell."""
    rows = []
    for label, result in sorted(results.items()):
        if label == ORIGINAL_DICE:
            ssp = iam = ""
            schedule = ORIGINAL_DICE
        else:
            ssp, iam, schedule = label.split("_", 2)
        rows.append(
            {
                "cell": label,
                "ssp": ssp,
                "iam": iam,
                "schedule": schedule,
                f"t_at_{year}": result.run.trajectory.value_at_year("t_at", year),
            }
        )
    return pd.DataFrame(rows)


def marker_table(results: dict, year: int = 2100) -> pd.DataFrame:
    """Schedule x SSP table of 2100 temperatures for the marker runs."""
    table = {}
    for schedule in SCHEDULE_IDS:
        row = {}
        for ssp, iam in cal.MARKER_IAM.items():
            label = f"{ssp}_{iam.replace('/', '-')}_{schedule.replace('@', '-')}"
            if label in results:
                row[ssp] = results[label].run.trajectory.value_at_year("t_at", year)
        table[schedule] = row
    return pd.DataFrame(table).T


def nonmarker_table(results: dict, year: int = 2100) -> pd.DataFrame:
    """(schedule, SSP) x IAM table of 2100 temperatures, non-marker set."""
    rows = []
    for schedule in SCHEDULE_IDS:
        for i in range(1, 6):
            row = {"schedule": schedule, "ssp": f"SSP{i}"}
            for iam in NONMARKER_IAMS:
                label = f"SSP{i}_{iam.replace('/', '-')}_{schedule.replace('@', '-')}"
                if label in results:
                    row[iam] = results[label].run.trajectory.value_at_year(
                        "t_at", year
                    )
            rows.append(row)
    return pd.DataFrame(rows)
