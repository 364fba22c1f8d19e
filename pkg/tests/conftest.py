import numpy as np
import pytest

from climstress.engine import RunConfig, run_scenario
from climstress.exogenous import dice_native_paths
from climstress.params import (
    ModelParams,
    bind_theta1,
    initial_state,
    load_parameter_file,
)
from climstress.cli import bundled_data_path
from climstress.reference import compute_reference, load_reference


@pytest.fixture(scope="session")
def raw():
    return load_parameter_file()


@pytest.fixture(scope="session")
def params(raw):
    return ModelParams.from_mapping(raw)


@pytest.fixture(scope="session")
def dice_exog(raw, params):
    return dice_native_paths(raw, params)


@pytest.fixture(scope="session")
def dice_params(params, dice_exog):
    return bind_theta1(params, dice_exog.sigma)


@pytest.fixture(scope="session")
def init_state(raw):
    return initial_state(raw)


@pytest.fixture(scope="session")
def reference_frame():
    return load_reference()


@pytest.fixture(scope="session")
def data_path():
    return bundled_data_path()


@pytest.fixture(scope="session")
def dice_solution(raw, params):
    """Fresh solve of the original-DICE welfare maximisation (one per
    session; several modules assert against it)."""
    run, problem = compute_reference(raw, params)
    return run, problem


@pytest.fixture(scope="session")
def artifacts_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("artifacts")


@pytest.fixture(scope="session")
def ssp1_cell(data_path, artifacts_dir):
    """One calibrated scenario cell reused across test modules."""
    return run_scenario(
        RunConfig(
            scenario="SSP1/IMAGE/netzero@2050",
            data_path=data_path,
            out_dir=str(artifacts_dir / "ssp1"),
        )
    )


def rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(b), 1e-12)
    return np.max(np.abs(a - b) / scale)
