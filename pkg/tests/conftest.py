from pathlib import Path
from typing import Literal

import numpy as np
import pytest

from quasidarwin.core.kdq import MeasurementSetting, benchmark_setting
from quasidarwin.core.model import ModelParams


@pytest.fixture
def anyio_backend() -> Literal["asyncio"]:
    return "asyncio"


@pytest.fixture
def temp_output_dir(tmp_path: Path) -> Path:
    """Create a temporary output directory for tests."""
    output_dir = tmp_path / "output"
    output_dir.mkdir()
    return output_dir


@pytest.fixture
def bench_params() -> ModelParams:
    """Δ = 1, J = (1, 1), Ω = 1.5."""
    return ModelParams(omega=1.5)


@pytest.fixture
def darwinistic_params() -> ModelParams:
    return ModelParams(omega=0.0)


@pytest.fixture
def bench_setting() -> MeasurementSetting:
    """|0><0| on E_1, |+i><+i| on E_2, |000>, at τ_a = 2.21."""
    return benchmark_setting(2.21)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
