"""Published reference values shipped with the package.

``hardware_reference.json`` holds measured hardware results (RMSE and N_AS of the benchmark
setting on simulators and devices) and the device calibration figures the noise presets
are built from. Loaded once from package data.
"""

from functools import lru_cache
from importlib.resources import files

from pydantic import BaseModel, ConfigDict, Field

__all__ = [
    "DeviceParameters",
    "HardwareReference",
    "load_reference",
]

reference_dir = files("quasidarwin.reference")


class DeviceParameters(BaseModel):
    """Median device calibration; times in seconds, errors as probabilities."""

    model_config = ConfigDict(frozen=True)

    label: str
    t1: float = Field(gt=0)
    t2: float = Field(gt=0)
    time_1q: float = Field(ge=0)
    time_2q: float = Field(ge=0)
    time_readout: float = Field(ge=0)
    error_1q: float = Field(ge=0, le=1)
    error_2q: float = Field(ge=0, le=1)
    error_readout: float = Field(ge=0, le=1)
    readout_note: str = ""


class HardwareReference(BaseModel):
    model_config = ConfigDict(frozen=True)

    provenance: str
    taus: tuple[float, ...]
    n_as: dict[str, tuple[float, ...]]
    rmse: dict[str, tuple[float, ...]]
    devices: dict[str, DeviceParameters]


@lru_cache(maxsize=1)
def load_reference() -> HardwareReference:
    text = (reference_dir / "hardware_reference.json").read_text(encoding="utf-8")
    return HardwareReference.model_validate_json(text)
