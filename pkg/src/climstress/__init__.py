"""Climate-economy scenario engine for actuarial stress testing.

Calibrates a DICE-2016 core to SSP baseline data, solves it under
net-zero emission schedules, prices the social cost of carbon along the
solved paths, and translates the temperature trajectories into excess
mortality stress tests on life-annuity and life-insurance portfolios.
"""

from .actuarial import (
    PortfolioSpec,
    StressResult,
    human_capital,
    simulate_annuity,
    simulate_insurance,
)
from .calibration import SspScenarioData, build_exogenous, calibrate_tfp, parse_ssp_export
from .engine import RunConfig, run_matrix, run_scenario
from .errors import ClimstressError
from .exogenous import ExogenousPaths
from .mortality import ExcessMortalityFn, GompertzLaw, MortalityTable, survival_probability
from .optimizer import OptimizationProblem, ScenarioRun, optimize_consumption, optimize_full
from .params import ControlVector, ModelParams, StateVector
from .scc import scc_pulse, scc_welfare_ratio
from .scenario import ControlSchedule, mu_from_mu_tilde, ramp_schedule
from .simulate import Trajectory, simulate

__version__ = "0.1.0"

__all__ = [
    "ClimstressError",
    "ControlSchedule",
    "ControlVector",
    "ExcessMortalityFn",
    "ExogenousPaths",
    "GompertzLaw",
    "ModelParams",
    "MortalityTable",
    "OptimizationProblem",
    "PortfolioSpec",
    "RunConfig",
    "ScenarioRun",
    "SspScenarioData",
    "StateVector",
    "StressResult",
    "Trajectory",
    "build_exogenous",
    "calibrate_tfp",
    "human_capital",
    "mu_from_mu_tilde",
    "optimize_consumption",
    "optimize_full",
    "parse_ssp_export",
    "ramp_schedule",
    "run_matrix",
    "run_scenario",
    "scc_pulse",
    "scc_welfare_ratio",
    "simulate",
    "simulate_annuity",
    "simulate_insurance",
    "survival_probability",
]
