"""The packaged DICE-2016 reference solution.

The reference trajectory ships as a CSV artifact generated by this
package's own solver on the native DICE-2016 inputs (see
``tools/make_reference.py``). Its independent anchors are the published
behaviour of that model: the optimal abatement control first reaches 1
in 2115 and the 2015 social cost of carbon sits near 31 USD/tCO2.
Calibration uses the reference capital path as the fixed-point seed.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import ConfigError
from .exogenous import dice_native_paths
from .optimizer import (
    OptimizationProblem,
    ScenarioRun,
    dice_mu_bounds,
    dice_savings_bounds,
    optimize_full,
)
from .params import ModelParams, bind_theta1, initial_state
from .scenario import fully_optimal_schedule

REFERENCE_COLUMNS = (
    "year", "s", "mu", "K", "m_at", "m_up", "m_lo", "t_at", "t_lo", "L",
    "y_gross", "q_net", "C", "e_ind", "e_total",
)


def reference_csv_path() -> Path:
    return Path(resources.files("climstress").joinpath("data/dice2016_reference.csv"))


def compute_reference(raw: dict, params: ModelParams) -> tuple[ScenarioRun, "OptimizationProblem"]:
    """Solve the original DICE-2016 welfare maximisation over (s, mu)."""
    exog = dice_native_paths(raw, params)
    bound_params = bind_theta1(params, exog.sigma)
    problem = OptimizationProblem(
        params=bound_params,
        exog=exog,
        schedule=fully_optimal_schedule(),
        initial_state=initial_state(raw),
        s_bounds=dice_savings_bounds(bound_params, raw),
        mu_bounds=dice_mu_bounds(bound_params, raw),
    )
    return optimize_full(problem), problem


def write_reference(run: ScenarioRun, path: str | Path) -> None:
    tr = run.trajectory
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
            "q_net": tr.q_net,
            "C": tr.C,
            "e_ind": tr.e_ind,
            "e_total": tr.e_total,
        }
    )
    header = (
        "# DICE-2016 reference solution generated by the climstress solver\n"
        f"# welfare: {run.welfare!r}\n"
        f"# iterations: {run.diagnostics['iterations']}\n"
        f"# projected_gradient_norm: {run.diagnostics['projected_gradient_norm']!r}\n"
    )
    Path(path).write_text(header + frame.to_csv(index=False, float_format="%.12g"))


def load_reference(path: str | Path | None = None) -> pd.DataFrame:
    path = Path(path) if path is not None else reference_csv_path()
    if not path.exists():
        raise ConfigError(
            f"reference artifact missing: {path}; run tools/make_reference.py"
        )
    frame = pd.read_csv(path, comment="#")
    missing = [c for c in REFERENCE_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigError(f"reference artifact lacks columns {missing}")
    return frame


def reference_capital_path(params: ModelParams) -> np.ndarray:
    """Capital path of the reference run (fixed-point calibration seed)."""
    frame = load_reference()
    K = frame["K"].to_numpy()
    if K.shape != (params.n_periods + 1,):
        raise ConfigError("reference artifact horizon mismatch")
    return K
