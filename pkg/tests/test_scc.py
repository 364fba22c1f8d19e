from dataclasses import replace

import numpy as np
import pytest

from climstress.errors import PulseError
from climstress.optimizer import OptimizationProblem, dice_savings_bounds, optimize_consumption
from climstress.scc import scc_grid, scc_pulse, scc_welfare_ratio
from climstress.scenario import ramp_schedule


@pytest.fixture(scope="module")
def dice_run(dice_solution):
    return dice_solution


def test_no_damage_channel_zero_scc(dice_params, dice_exog, init_state, raw):
    """pi2 = 0 removes the only pulse-to-consumption channel."""
    nodmg = replace(dice_params, pi2=0.0)
    schedule = ramp_schedule("netzero", 2050, dice_exog.years)
    problem = OptimizationProblem(
        params=nodmg, exog=dice_exog, schedule=schedule,
        initial_state=init_state, s_bounds=dice_savings_bounds(nodmg, raw),
    )
    run = optimize_consumption(problem)
    for t in (0, 5, 17):
        assert scc_pulse(run, problem, t) == pytest.approx(0.0, abs=1e-9)
        assert scc_welfare_ratio(run, problem, t) == pytest.approx(0.0, abs=1e-9)


def test_dice_2025_band(dice_run):
    run, problem = dice_run
    idx = list(run.years).index(2025)
    scc = scc_pulse(run, problem, idx)
    assert 30.0 <= scc <= 50.0


def test_pulse_vs_ratio_consistency(dice_run):
    run, problem = dice_run
    for year in (2015, 2050, 2100):
        idx = list(run.years).index(year)
        pulse = scc_pulse(run, problem, idx)
        ratio = scc_welfare_ratio(run, problem, idx)
        assert abs(pulse - ratio) / pulse <= 0.05


def test_pulse_halving_linearity(dice_run):
    run, problem = dice_run
    idx = list(run.years).index(2050)
    full = scc_pulse(run, problem, idx, pulse_size=1.0)
    half = scc_pulse(run, problem, idx, pulse_size=0.5)
    assert abs(half - full) / full <= 0.01


def test_scc_nonnegative_path(dice_run):
    run, problem = dice_run
    grid = scc_grid(run, problem, through_year=2100)
    values = grid["scc_usd_per_tco2"]
    horizon = ~np.isnan(values)
    assert np.all(values[horizon] >= 0.0)
    assert np.all(np.isnan(values[~horizon]))


def test_linearity_check_diagnostic(dice_run):
    run, problem = dice_run
    grid = scc_grid(run, problem, through_year=2025, linearity_check=True)
    assert grid["max_halving_rel_change"] <= 0.01


def test_bad_pulse_rejected(dice_run):
    run, problem = dice_run
    with pytest.raises(PulseError):
        scc_pulse(run, problem, 0, pulse_size=0.0)
    with pytest.raises(PulseError):
        scc_pulse(run, problem, 0, pulse_size=5e6)  # collapses consumption


def test_schedule_near_invariance(ssp1_cell, data_path, artifacts_dir):
    """Net-zero 2050 vs 2100 SCC paths differ by a bounded margin at
    each decade (the marginal damage is a property of the SSP, not of
    the mitigation schedule)."""
    from climstress.engine import RunConfig, run_scenario

    other = run_scenario(
        RunConfig(scenario="SSP1/IMAGE/netzero@2100", data_path=data_path,
                  out_dir=str(artifacts_dir / "ssp1_nz2100"))
    )
    years = ssp1_cell.scc["years"]
    a = ssp1_cell.scc["scc_usd_per_tco2"]
    b = other.scc["scc_usd_per_tco2"]
    for year in range(2020, 2101, 10):
        idx = int(np.searchsorted(years, year))
        assert abs(a[idx] - b[idx]) / (0.5 * (a[idx] + b[idx])) <= 0.15
