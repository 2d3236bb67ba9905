import logging

import pytest

from config import RunConfig
from fields.grid import make_grid
from testlib.scalar_functions import ScalarFnSpec, sample_scalar
from verify.suite_config import SuiteConfig


@pytest.fixture
def grid():
    return make_grid(1, 10.0, 96)


@pytest.fixture
def small_grid():
    return make_grid(1, 6.0, 48)


@pytest.fixture
def grid_2d():
    return make_grid(2, 4.0, 12)


@pytest.fixture
def gaussian():
    return ScalarFnSpec("gaussian", center=0.0, width=1.0, amplitude=1.0)


@pytest.fixture
def gaussian_field(grid, gaussian):
    return sample_scalar(gaussian, grid)


@pytest.fixture
def run_config(tmp_path):
    return RunConfig(output_dir=str(tmp_path / "results"), baseline_dir=str(tmp_path / "baselines"))


@pytest.fixture
def suite_config(run_config):
    """用覆盖设置构造小规模的套件配置"""
    def make(suite_id, **overrides):
        settings = run_config.suite_settings(suite_id)
        tolerances = overrides.pop("tolerances", {})
        settings["tolerances"].update(tolerances)
        settings.update(overrides)
        return SuiteConfig(suite_id, settings)
    return make


@pytest.fixture(autouse=True)
def quiet_progress(monkeypatch):
    from config import OUTPUT_CONFIG
    monkeypatch.setitem(OUTPUT_CONFIG, "progress", False)
    logging.getLogger("fracbench").setLevel(logging.WARNING)
