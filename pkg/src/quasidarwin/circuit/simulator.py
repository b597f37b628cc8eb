"""Statevector emulation of circuits, noiseless or as Monte-Carlo noise trajectories."""

import logging

import numpy as np
from numpy.typing import NDArray

from quasidarwin.circuit.gates import Circuit, Gate, apply_matrix, gate_matrix
from quasidarwin.circuit.noise import NoiseModel, apply_decay, apply_gate_noise
from quasidarwin.constants import TOLERANCES
from quasidarwin.core.exceptions import ConfigError, DimensionError
from quasidarwin.core.numerics import StateVector

__all__ = [
    "MAX_UNITARY_QUBITS",
    "ancilla_p0",
    "circuit_unitary",
    "marginal_p0",
    "run_gates",
    "simulate",
    "zero_state",
]

logger = logging.getLogger(__name__)

MAX_UNITARY_QUBITS = 10


def zero_state(n: int) -> NDArray[np.complex128]:
    state = np.zeros(2**n, dtype=np.complex128)
    state[0] = 1.0
    return state


def run_gates(
    state: NDArray[np.complex128],
    gates: tuple[Gate, ...] | list[Gate],
    n: int,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
) -> NDArray[np.complex128]:
    """Apply gates in order to a raw amplitude array (or a batch of them)."""
    noisy = noise is not None and not noise.is_noiseless
    if noisy and rng is None:
        raise ConfigError("a random generator is required for noisy simulation")
    for gate in gates:
        state = apply_matrix(state, gate_matrix(gate), gate.qubits, n)
        if noisy:
            state = apply_gate_noise(state, gate, noise, rng, n)
    return state


def simulate(
    circuit: Circuit,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
    initial: StateVector | None = None,
) -> StateVector:
    """Final state of ``circuit`` from ``|0...0>`` (or ``initial``).

    With a noise model this is one Monte-Carlo trajectory; the measured qubit additionally
    decays for the readout time. The readout bit flip is classical and is applied by
    :func:`ancilla_p0`, not here.
    """
    n = circuit.n_qubits
    if initial is None:
        state = zero_state(n)
    else:
        if initial.n_qubits != n:
            raise DimensionError(f"{initial.n_qubits}-qubit initial state for a {n}-qubit circuit")
        state = np.array(initial.amplitudes)
    state = run_gates(state, circuit.gates, n, noise, rng)
    if noise is not None and not noise.is_noiseless:
        state = apply_decay(state, (circuit.measured_qubit,), noise.time_readout, noise, rng, n)
    return StateVector(amplitudes=state, n_qubits=n)


def marginal_p0(state: StateVector, qubit: int) -> float:
    """Probability of reading ``0`` on ``qubit``."""
    psi = state.amplitudes.reshape((2,) * state.n_qubits)
    p0 = float(np.sum(np.abs(np.take(psi, 0, axis=qubit)) ** 2))
    return min(1.0, max(0.0, p0))


def ancilla_p0(
    circuit: Circuit,
    n_trajectories: int = 1,
    noise: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Probability that the measured qubit reads ``0``.

    Noiseless: exact marginal of the final state. Noisy: mean over ``n_trajectories``
    trajectories of the exact per-trajectory marginal, with the readout flip folded in.

    Raises:
        ConfigError: If noisy and ``n_trajectories < 1`` or no ``rng`` is given.
    """
    if noise is None or noise.is_noiseless:
        return marginal_p0(simulate(circuit), circuit.measured_qubit)
    if n_trajectories < 1:
        raise ConfigError("n_trajectories must be >= 1 for noisy simulation")
    if rng is None:
        raise ConfigError("a random generator is required for noisy simulation")
    total = 0.0
    for _ in range(n_trajectories):
        total += marginal_p0(simulate(circuit, noise, rng), circuit.measured_qubit)
    return noise.fold_readout(total / n_trajectories)


def circuit_unitary(circuit: Circuit) -> NDArray[np.complex128]:
    """Full unitary of a noiseless circuit (at most ``MAX_UNITARY_QUBITS`` qubits)."""
    n = circuit.n_qubits
    if n > MAX_UNITARY_QUBITS:
        raise DimensionError(f"circuit_unitary supports at most {MAX_UNITARY_QUBITS} qubits, got {n}")
    # Rows of the batch are the images of the basis states, i.e. the columns of U
    columns = run_gates(np.eye(2**n, dtype=np.complex128), circuit.gates, n)
    u = columns.T
    if np.max(np.abs(u.conj().T @ u - np.eye(2**n))) > TOLERANCES.compositional:
        logger.warning("Composed circuit unitary deviates from unitarity")
    return u
