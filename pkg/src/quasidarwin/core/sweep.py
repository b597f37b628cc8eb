"""Random measurement settings, grid sweeps and heatmap/CDF aggregation.

Settings are drawn from Haar-random single-qubit states. Setting ``k`` always comes from the
counter-based stream ``Philox(SeedSequence(seed, spawn_key=(k,)))``, so the same settings are
used for every transverse field and every τ, and results do not depend on how work is split
between threads.
"""

import logging
from dataclasses import dataclass, field
from functools import partial

import anyio
import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from quasidarwin.constants import (
    BENCHMARK_PEAK_TAU,
    DEFAULT_MEASURE,
    DEFAULT_N_SETTINGS,
    DEFAULT_OMEGA_GRID,
    DEFAULT_TAU_MAX,
    DEFAULT_TAU_MIN,
    DEFAULT_TAU_STEPS,
    DEFAULT_WORKERS,
    HEATMAP_BINS,
    HEATMAP_LOG_RANGE,
    MeasureName,
)
from quasidarwin.core.exceptions import InvalidSettingError
from quasidarwin.core.kdq import MeasurementSetting, benchmark_setting, kd_time_series, measure_values
from quasidarwin.core.model import ModelParams, spectrum
from quasidarwin.core.numerics import StateVector
from quasidarwin.utils.parallel import ProgressCallback, chunk_bounds, map_indexed, rng_for

__all__ = [
    "CdfDataset",
    "HeatmapDataset",
    "SweepConfig",
    "asweep_cdf",
    "asweep_heatmap",
    "haar_random_qubit_state",
    "heatmap_bin_edges",
    "random_setting",
    "rng_for",
    "setting_for",
    "sweep_cdf",
    "sweep_heatmap",
]

logger = logging.getLogger(__name__)

# Work units per worker; keeps threads busy without per-setting dispatch overhead
CHUNKS_PER_WORKER = 4


class SweepConfig(BaseModel):
    """Grid and sampling parameters for heatmap and CDF sweeps."""

    model_config = ConfigDict(frozen=True)

    omega_grid: tuple[float, ...] = DEFAULT_OMEGA_GRID
    tau_min: float = Field(default=DEFAULT_TAU_MIN, ge=0.0)
    tau_max: float = DEFAULT_TAU_MAX
    tau_steps: int = Field(default=DEFAULT_TAU_STEPS, ge=1)
    n_settings: int = Field(default=DEFAULT_N_SETTINGS, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    measure: MeasureName = DEFAULT_MEASURE
    resample_per_tau: bool = False
    cdf_tau: float = Field(default=BENCHMARK_PEAK_TAU, ge=0.0)
    workers: int = Field(default=DEFAULT_WORKERS, ge=1)

    @model_validator(mode="after")
    def _check(self) -> "SweepConfig":
        if self.tau_max <= self.tau_min:
            raise ValueError(f"tau_max={self.tau_max} must exceed tau_min={self.tau_min}")
        if not self.omega_grid:
            raise ValueError("omega_grid must not be empty")
        if any(w < 0 for w in self.omega_grid):
            raise ValueError("transverse fields must be nonnegative")
        return self

    @property
    def taus(self) -> NDArray[np.float64]:
        return np.linspace(self.tau_min, self.tau_max, self.tau_steps)


def haar_random_qubit_state(rng: np.random.Generator) -> StateVector:
    """Haar-random pure qubit state from two normalised standard complex Gaussians."""
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return StateVector(amplitudes=z / np.linalg.norm(z), n_qubits=1)


def _require_two_sites(params: ModelParams) -> None:
    if params.n_env < 2:
        raise InvalidSettingError(
            f"random settings measure E_1 and E_2 but the model has {params.n_env} environment qubit(s)"
        )


def random_setting(rng: np.random.Generator, params: ModelParams) -> MeasurementSetting:
    """Haar-random projectors on E_1 and E_2 and a Haar-random product initial state."""
    _require_two_sites(params)
    phi_a = haar_random_qubit_state(rng)
    phi_b = haar_random_qubit_state(rng)
    factors = [haar_random_qubit_state(rng) for _ in range(params.n_qubits)]
    return MeasurementSetting.from_states(phi_a, phi_b, factors, site_a=1, site_b=2)


def setting_for(seed: int, params: ModelParams, index: int, tau_index: int | None = None) -> MeasurementSetting:
    """The ``index``-th random setting of a sweep (optionally resampled per τ index)."""
    key = (index,) if tau_index is None else (index, tau_index)
    return random_setting(rng_for(seed, *key), params)


def heatmap_bin_edges(n_bins: int = HEATMAP_BINS) -> NDArray[np.float64]:
    lo, hi = HEATMAP_LOG_RANGE
    return np.logspace(np.log10(lo), np.log10(hi), n_bins + 1)


@dataclass
class HeatmapDataset:
    """Measure values on an (Ω, setting, τ) grid plus per-τ histograms.

    ``counts[w, t, 0]`` is the underflow bin (values below ``bin_edges[0]``);
    ``counts[w, t, k + 1]`` counts values in ``[bin_edges[k], bin_edges[k + 1])``, with values
    above the top edge clipped into the last bin. ``designated[w]`` is the trace of the
    benchmark setting.
    """

    omegas: NDArray[np.float64]
    taus: NDArray[np.float64]
    measure: str
    values: NDArray[np.float64]  # (W, N, T)
    designated: NDArray[np.float64]  # (W, T)
    bin_edges: NDArray[np.float64] = field(default_factory=heatmap_bin_edges)
    counts: NDArray[np.int64] = field(init=False)

    def __post_init__(self) -> None:
        n_bins = self.bin_edges.size - 1
        idx = np.minimum(np.searchsorted(self.bin_edges, self.values, side="right"), n_bins)
        w, _, t = self.values.shape
        counts = np.zeros((w, t, n_bins + 1), dtype=np.int64)
        for k in range(n_bins + 1):
            counts[:, :, k] = np.sum(idx == k, axis=1)
        self.counts = counts

    def bin_ranges(self) -> list[tuple[float, float]]:
        edges = self.bin_edges
        return [(0.0, float(edges[0]))] + [(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:], strict=True)]

    def underflow_fraction(self, w: int) -> float:
        return float(self.counts[w, :, 0].sum() / self.counts[w].sum())

    def to_rows(self) -> list[dict[str, object]]:
        """CSV rows ``omega, tau, bin_lo, bin_hi, count``."""
        ranges = self.bin_ranges()
        return [
            {"omega": float(omega), "tau": float(tau), "bin_lo": lo, "bin_hi": hi, "count": int(self.counts[w, t, k])}
            for w, omega in enumerate(self.omegas)
            for t, tau in enumerate(self.taus)
            for k, (lo, hi) in enumerate(ranges)
        ]

    def designated_rows(self) -> list[dict[str, object]]:
        """CSV rows ``omega, tau, value`` for the benchmark-setting trace."""
        return [
            {"omega": float(omega), "tau": float(tau), "value": float(self.designated[w, t])}
            for w, omega in enumerate(self.omegas)
            for t, tau in enumerate(self.taus)
        ]

    def summary(self) -> list[dict[str, float]]:
        """Min / median / max of the measure over all settings and times, per Ω."""
        return [
            {
                "omega": float(omega),
                "min": float(np.min(self.values[w])),
                "median": float(np.median(self.values[w])),
                "max": float(np.max(self.values[w])),
            }
            for w, omega in enumerate(self.omegas)
        ]

    def to_dict(self) -> dict[str, object]:
        return {
            "measure": self.measure,
            "omegas": self.omegas,
            "taus": self.taus,
            "bin_edges": self.bin_edges,
            "counts": self.counts,
            "designated": self.designated,
            "summary": self.summary(),
        }


@dataclass
class CdfDataset:
    """Sorted measure values and cumulative fractions per Ω at a fixed ``tau_a``."""

    omegas: NDArray[np.float64]
    tau_a: float
    measure: str
    values: NDArray[np.float64]  # (W, N), unsorted in setting order

    @property
    def sorted_values(self) -> NDArray[np.float64]:
        return np.sort(self.values, axis=1)

    @property
    def fractions(self) -> NDArray[np.float64]:
        n = self.values.shape[1]
        return np.arange(1, n + 1) / n

    def count_below(self, threshold: float) -> list[int]:
        return [int(np.sum(row < threshold)) for row in self.values]

    def to_rows(self) -> list[dict[str, object]]:
        """CSV rows ``omega, value, cum_frac``."""
        fractions = self.fractions
        return [
            {"omega": float(omega), "value": float(v), "cum_frac": float(f)}
            for omega, row in zip(self.omegas, self.sorted_values, strict=True)
            for v, f in zip(row, fractions, strict=True)
        ]

    def summary(self) -> list[dict[str, float]]:
        return [
            {
                "omega": float(omega),
                "min": float(np.min(row)),
                "median": float(np.median(row)),
                "max": float(np.max(row)),
            }
            for omega, row in zip(self.omegas, self.values, strict=True)
        ]

    def to_dict(self) -> dict[str, object]:
        return {
            "measure": self.measure,
            "tau_a": self.tau_a,
            "omegas": self.omegas,
            "values": self.sorted_values,
            "cum_frac": self.fractions,
            "summary": self.summary(),
        }


def _trace_values(
    setting: MeasurementSetting, params: ModelParams, taus: NDArray[np.float64], measure: MeasureName
) -> NDArray[np.float64]:
    q, p = kd_time_series(setting, params, taus)
    return measure_values(q, p if measure == "N_H" else None, measure)


async def asweep_heatmap(
    config: SweepConfig,
    params_base: ModelParams,
    *,
    on_progress: ProgressCallback | None = None,
) -> HeatmapDataset:
    """Evaluate the configured measure for every (Ω, setting, τ) on worker threads."""
    _require_two_sites(params_base)
    taus = config.taus
    omegas = np.asarray(config.omega_grid, dtype=np.float64)
    models = [params_base.with_omega(float(w)) for w in omegas]
    for m in models:
        spectrum(m)  # warm the cache before fan-out

    values = np.empty((omegas.size, config.n_settings, taus.size))
    chunks = chunk_bounds(config.n_settings, config.workers * CHUNKS_PER_WORKER)
    tasks = [(w, start, stop) for w in range(omegas.size) for start, stop in chunks]

    def run_chunk(index: int) -> None:
        w, start, stop = tasks[index]
        for k in range(start, stop):
            if config.resample_per_tau:
                for t, tau in enumerate(taus):
                    setting = setting_for(config.seed, params_base, k, t)
                    values[w, k, t] = _trace_values(setting, models[w], np.array([tau]), config.measure)[0]
            else:
                values[w, k] = _trace_values(setting_for(config.seed, params_base, k), models[w], taus, config.measure)

    logger.info(
        "Heatmap sweep: %d fields x %d settings x %d times (%s)", omegas.size, config.n_settings, taus.size, config.measure
    )
    await map_indexed(run_chunk, len(tasks), workers=config.workers, on_progress=on_progress)

    # The benchmark setting only exists for two environment qubits
    reference = benchmark_setting() if params_base.n_env == 2 else setting_for(config.seed, params_base, 0)
    designated = np.stack([_trace_values(reference, m, taus, config.measure) for m in models])
    return HeatmapDataset(omegas=omegas, taus=taus, measure=config.measure, values=values, designated=designated)


async def asweep_cdf(
    config: SweepConfig,
    params_base: ModelParams,
    tau_a: float,
    *,
    on_progress: ProgressCallback | None = None,
) -> CdfDataset:
    """Measure values of every random setting at a single ``tau_a``, per Ω."""
    _require_two_sites(params_base)
    omegas = np.asarray(config.omega_grid, dtype=np.float64)
    models = [params_base.with_omega(float(w)) for w in omegas]
    for m in models:
        spectrum(m)

    grid = np.array([tau_a])
    values = np.empty((omegas.size, config.n_settings))
    chunks = chunk_bounds(config.n_settings, config.workers * CHUNKS_PER_WORKER)
    tasks = [(w, start, stop) for w in range(omegas.size) for start, stop in chunks]

    def run_chunk(index: int) -> None:
        w, start, stop = tasks[index]
        for k in range(start, stop):
            setting = setting_for(config.seed, params_base, k)
            values[w, k] = _trace_values(setting, models[w], grid, config.measure)[0]

    logger.info("CDF sweep: %d fields x %d settings at tau_a=%g", omegas.size, config.n_settings, tau_a)
    await map_indexed(run_chunk, len(tasks), workers=config.workers, on_progress=on_progress)
    return CdfDataset(omegas=omegas, tau_a=float(tau_a), measure=config.measure, values=values)


def sweep_heatmap(
    config: SweepConfig, params_base: ModelParams, *, on_progress: ProgressCallback | None = None
) -> HeatmapDataset:
    return anyio.run(partial(asweep_heatmap, config, params_base, on_progress=on_progress))


def sweep_cdf(
    config: SweepConfig,
    params_base: ModelParams,
    tau_a: float | None = None,
    *,
    on_progress: ProgressCallback | None = None,
) -> CdfDataset:
    tau = config.cdf_tau if tau_a is None else tau_a
    return anyio.run(partial(asweep_cdf, config, params_base, tau, on_progress=on_progress))
