"""Gate set, gate matrices and the circuit container.

Multi-qubit gate matrices act on the gate's qubits in listed order, the first listed qubit
being the most significant, consistent with the global qubit ordering.
"""

from enum import StrEnum
from math import cos, isfinite, sin
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, model_validator

from quasidarwin.constants import MAX_QUBITS
from quasidarwin.core.exceptions import DimensionError
from quasidarwin.core.numerics import HADAMARD, IDENTITY_2, PAULI_X

__all__ = [
    "Circuit",
    "Gate",
    "GateKind",
    "apply_matrix",
    "gate_matrix",
]


class GateKind(StrEnum):
    H = "H"
    X = "X"
    S = "S"
    S_DAGGER = "S_DAGGER"
    RX = "RX"
    RZ = "RZ"
    RXX = "RXX"
    CNOT = "CNOT"
    CSWAP = "CSWAP"


ARITY: dict[GateKind, int] = {
    GateKind.H: 1,
    GateKind.X: 1,
    GateKind.S: 1,
    GateKind.S_DAGGER: 1,
    GateKind.RX: 1,
    GateKind.RZ: 1,
    GateKind.RXX: 2,
    GateKind.CNOT: 2,
    GateKind.CSWAP: 3,
}
PARAMETRIC = frozenset({GateKind.RX, GateKind.RZ, GateKind.RXX})

_FIXED: dict[GateKind, NDArray[np.complex128]] = {
    GateKind.H: np.asarray(HADAMARD),
    GateKind.X: np.asarray(PAULI_X),
    GateKind.S: np.diag([1, 1j]).astype(np.complex128),
    GateKind.S_DAGGER: np.diag([1, -1j]).astype(np.complex128),
    GateKind.CNOT: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128),
}
_CSWAP = np.eye(8, dtype=np.complex128)
_CSWAP[[5, 6]] = _CSWAP[[6, 5]]
_FIXED[GateKind.CSWAP] = _CSWAP
_XX = np.kron(PAULI_X, PAULI_X)


class Gate(BaseModel):
    """One gate on indexed qubits; ``theta`` is set exactly for RX, RZ and RXX."""

    model_config = ConfigDict(frozen=True)

    kind: GateKind
    qubits: tuple[int, ...]
    theta: float | None = None

    @model_validator(mode="after")
    def _check(self) -> Self:
        if len(self.qubits) != ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {ARITY[self.kind]} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} qubits must be distinct, got {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError("qubit indices must be nonnegative")
        if (self.kind in PARAMETRIC) != (self.theta is not None):
            raise ValueError(f"{self.kind} {'needs' if self.kind in PARAMETRIC else 'takes no'} angle")
        if self.theta is not None and not isfinite(self.theta):
            raise ValueError("angle must be finite")
        return self

    @property
    def arity(self) -> int:
        return ARITY[self.kind]

    def to_line(self) -> str:
        """``KIND q0 [q1 [q2]] [theta]``."""
        parts = [self.kind.value, *(str(q) for q in self.qubits)]
        if self.theta is not None:
            parts.append(repr(self.theta))
        return " ".join(parts)


def gate_matrix(gate: Gate) -> NDArray[np.complex128]:
    """Unitary of a gate on its own qubits."""
    t = gate.theta
    match gate.kind:
        case GateKind.RX:
            return cos(t / 2) * IDENTITY_2 - 1j * sin(t / 2) * PAULI_X
        case GateKind.RZ:
            return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
        case GateKind.RXX:
            return cos(t / 2) * np.eye(4) - 1j * sin(t / 2) * _XX
        case kind:
            return _FIXED[kind]


def apply_matrix(
    state: NDArray[np.complex128], matrix: NDArray[np.complex128], qubits: tuple[int, ...], n: int
) -> NDArray[np.complex128]:
    """Apply a ``k``-qubit matrix to ``qubits`` of a state, or of a batch of states of shape ``(..., 2**n)``."""
    k = len(qubits)
    batch = state.shape[:-1]
    psi = state.reshape(batch + (2,) * n)
    axes = [len(batch) + q for q in qubits]
    out = np.tensordot(matrix.reshape((2,) * (2 * k)), psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(state.shape)


class Circuit(BaseModel):
    """Ordered gate list on ``n_qubits`` qubits with one designated measured qubit."""

    model_config = ConfigDict(frozen=True)

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    measured_qubit: int = 0

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise DimensionError(f"{self.n_qubits} circuit qubits outside 1..{MAX_QUBITS}")
        for gate in self.gates:
            if max(gate.qubits) >= self.n_qubits:
                raise ValueError(f"{gate.to_line()} addresses a qubit outside 0..{self.n_qubits - 1}")
        if not 0 <= self.measured_qubit < self.n_qubits:
            raise ValueError(f"measured qubit {self.measured_qubit} out of range")
        return self

    def count(self, *kinds: GateKind) -> int:
        return sum(g.kind in kinds for g in self.gates)

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for g in self.gates:
            counts[g.kind.value] = counts.get(g.kind.value, 0) + 1
        return counts

    def to_text(self) -> str:
        """Plain-text gate list, one gate per line, preceded by a qubit/measurement header."""
        lines = [f"# qubits {self.n_qubits}", f"# measure {self.measured_qubit}"]
        lines.extend(g.to_line() for g in self.gates)
        return "\n".join(lines) + "\n"
