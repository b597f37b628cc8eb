from typing import Literal

from pydantic import BaseModel, ConfigDict


class Tolerances(BaseModel):
    """Numerical tolerances shared by every module."""

    model_config = ConfigDict(frozen=True)

    structural: float = 1e-12  # Hermiticity, unitarity, normalisation
    compositional: float = 1e-10  # results of several products (propagators, marginals, KD identities)
    classical: float = 1e-10  # imaginary/negative parts below this count as classical
    projector: float = 1e-10  # P @ P == P


TOLERANCES = Tolerances()

# Hilbert space limits
MAX_QUBITS = 14  # Full cycle-test circuit: 1 test ancilla + 3 registers of 3 + 4 Bell ancillas

# Default model (Δ = J = 1, two environment qubits)
DEFAULT_DELTA = 1.0
DEFAULT_COUPLING = 1.0
DEFAULT_N_ENV = 2

# Sweep grids
DEFAULT_OMEGA_GRID = (0.0, 0.5, 1.0, 1.5)
DEFAULT_TAU_MIN = 0.0
DEFAULT_TAU_MAX = 20.0
DEFAULT_TAU_STEPS = 401  # step 0.05
DEFAULT_N_SETTINGS = 5000
HEATMAP_BINS = 100
HEATMAP_LOG_RANGE = (1e-6, 10.0)  # log-spaced bins; values below the lower edge go to the underflow bin
DEFAULT_WORKERS = 4

# Benchmark experiment
BENCHMARK_OMEGA = 1.5
BENCHMARK_TAUS = (0.0, 2.21, 3.66)
BENCHMARK_PEAK_TAU = 3.66
DEFAULT_TROTTER_STEPS = 5
DEFAULT_SHOTS = 10_000
DEFAULT_TRAJECTORIES = 50

# Measure names
type MeasureName = Literal["N_AS", "N_H", "N_INF"]
DEFAULT_MEASURE: MeasureName = "N_AS"
