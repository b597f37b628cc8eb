"""Gate-level emulation of the cycle-test measurement protocol."""

from quasidarwin.circuit.cycle_test import (
    IMAG_SIGN,
    KDEstimate,
    OutcomePart,
    ShotRecord,
    build_cycle_test,
    decode_quasiprobability,
    estimate_kd,
    trotterized_propagator,
)
from quasidarwin.circuit.gates import Circuit, Gate, GateKind
from quasidarwin.circuit.noise import NoiseModel, noise_preset
from quasidarwin.circuit.simulator import ancilla_p0, simulate

__all__ = [
    "IMAG_SIGN",
    "Circuit",
    "Gate",
    "GateKind",
    "KDEstimate",
    "NoiseModel",
    "OutcomePart",
    "ShotRecord",
    "ancilla_p0",
    "build_cycle_test",
    "decode_quasiprobability",
    "estimate_kd",
    "noise_preset",
    "simulate",
    "trotterized_propagator",
]
