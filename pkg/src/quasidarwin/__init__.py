"""Kirkwood-Dirac quasiprobabilities and Quantum Darwinism in a system-environment qubit model.

Example usage:
    from quasidarwin import ModelParams, benchmark_setting, analyze

    params = ModelParams(omega=1.5)
    result = analyze(benchmark_setting(time_a=3.66), params)
    print(result.report.n_as)  # ~0.988

    from quasidarwin.circuit import estimate_kd

    estimate = estimate_kd(benchmark_setting(time_a=3.66), params, shots_per_part=10_000, seed=1)
    print(estimate.rmse(result.kd.q))
"""

from quasidarwin.core.exceptions import QuasiDarwinError
from quasidarwin.core.kdq import (
    KDDistribution,
    MeasurementSetting,
    ModificationTerms,
    NonclassicalityReport,
    TPMDistribution,
    analyze,
    benchmark_setting,
    kd_distribution,
    measures,
    modification_terms,
    tpm_distribution,
)
from quasidarwin.core.model import ModelParams, build_hamiltonian, is_darwinistic, propagator
from quasidarwin.core.numerics import DenseOperator, StateVector
from quasidarwin.core.sweep import SweepConfig, sweep_cdf, sweep_heatmap

__all__ = [
    "DenseOperator",
    "KDDistribution",
    "MeasurementSetting",
    "ModelParams",
    "ModificationTerms",
    "NonclassicalityReport",
    "QuasiDarwinError",
    "StateVector",
    "SweepConfig",
    "TPMDistribution",
    "analyze",
    "benchmark_setting",
    "build_hamiltonian",
    "is_darwinistic",
    "kd_distribution",
    "measures",
    "modification_terms",
    "propagator",
    "sweep_cdf",
    "sweep_heatmap",
    "tpm_distribution",
]
