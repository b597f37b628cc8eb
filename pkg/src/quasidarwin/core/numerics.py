"""Dense complex linear algebra on small Hilbert spaces.

Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a basis index:
``|q0 q1 ... q_{n-1}>`` has index ``q0 * 2**(n-1) + ... + q_{n-1}``.

All values are immutable after construction: arrays are copied on validation and marked
read-only, so they can be shared freely between worker threads.
"""

import logging
from functools import reduce
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, model_validator

from quasidarwin.constants import MAX_QUBITS, TOLERANCES
from quasidarwin.core.exceptions import DimensionError, NotHermitianError, NotProjectorError
from quasidarwin.utils.serialization import ComplexArray, frozen_array

__all__ = [
    "HADAMARD",
    "IDENTITY_2",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "DenseOperator",
    "StateVector",
    "apply",
    "commutator_norm",
    "expectation",
    "hermitian_eig",
    "identity",
    "is_hermitian",
    "is_projector",
    "is_unitary",
    "kron",
    "kron_all",
    "matexp_i",
    "n_qubits_for_dim",
    "product_state",
    "require_projector",
]

logger = logging.getLogger(__name__)

IDENTITY_2 = frozen_array(np.eye(2))
PAULI_X = frozen_array([[0, 1], [1, 0]])
PAULI_Y = frozen_array([[0, -1j], [1j, 0]])
PAULI_Z = frozen_array([[1, 0], [0, -1]])
HADAMARD = frozen_array(np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def n_qubits_for_dim(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension; rejects non powers of two."""
    if dim < 2 or dim & (dim - 1):
        raise DimensionError(f"dimension {dim} is not a power of two >= 2")
    n = dim.bit_length() - 1
    if n > MAX_QUBITS:
        raise DimensionError(f"{n} qubits exceed the configured maximum of {MAX_QUBITS}")
    return n


def _max_dev(m: NDArray[np.complex128]) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_hermitian(m: NDArray[np.complex128], tol: float = TOLERANCES.structural) -> bool:
    return _max_dev(m - m.conj().T) <= tol


def is_unitary(m: NDArray[np.complex128], tol: float = TOLERANCES.structural) -> bool:
    return _max_dev(m.conj().T @ m - np.eye(m.shape[0])) <= tol


def is_projector(m: NDArray[np.complex128], tol: float = TOLERANCES.projector) -> bool:
    return is_hermitian(m, tol) and _max_dev(m @ m - m) <= tol


class StateVector(BaseModel):
    """Normalized pure state on ``n_qubits`` qubits."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitudes: ComplexArray
    n_qubits: int

    @model_validator(mode="before")
    @classmethod
    def _infer_n_qubits(cls, data: object) -> object:
        if isinstance(data, dict) and "n_qubits" not in data and "amplitudes" in data:
            data = {**data, "n_qubits": n_qubits_for_dim(len(frozen_array(data["amplitudes"])))}
        return data

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.amplitudes.ndim != 1:
            raise ValueError("amplitudes must be a 1-D array")
        if n_qubits_for_dim(self.amplitudes.shape[0]) != self.n_qubits:
            raise ValueError(f"length {self.amplitudes.shape[0]} does not match n_qubits={self.n_qubits}")
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > TOLERANCES.structural:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        return self

    @classmethod
    def from_amplitudes(cls, amplitudes: object, *, normalize: bool = False) -> "StateVector":
        arr = np.asarray(frozen_array(amplitudes))
        if normalize:
            arr = arr / np.linalg.norm(arr)
        return cls(amplitudes=arr)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state from a bit string, e.g. ``"000"``."""
        n = len(bits)
        vec = np.zeros(2**n, dtype=np.complex128)
        vec[int(bits, 2)] = 1.0
        return cls(amplitudes=vec, n_qubits=n)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density_matrix(self) -> NDArray[np.complex128]:
        return np.outer(self.amplitudes, self.amplitudes.conj())


class DenseOperator(BaseModel):
    """Dense ``2**n x 2**n`` complex matrix, optionally tagged Hermitian and/or unitary.

    Tags are verified at construction within the structural tolerance.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: ComplexArray
    n_qubits: int
    hermitian: bool = False
    unitary: bool = False

    @model_validator(mode="before")
    @classmethod
    def _infer_n_qubits(cls, data: object) -> object:
        if isinstance(data, dict) and "n_qubits" not in data and "entries" in data:
            data = {**data, "n_qubits": n_qubits_for_dim(len(frozen_array(data["entries"])))}
        return data

    @model_validator(mode="after")
    def _check(self) -> Self:
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        if n_qubits_for_dim(m.shape[0]) != self.n_qubits:
            raise ValueError(f"dimension {m.shape[0]} does not match n_qubits={self.n_qubits}")
        if self.hermitian and not is_hermitian(m):
            raise ValueError(f"operator tagged Hermitian deviates by {_max_dev(m - m.conj().T):.3e}")
        if self.unitary and not is_unitary(m):
            raise ValueError("operator tagged unitary is not unitary within tolerance")
        return self

    @classmethod
    def from_matrix(cls, m: object, *, hermitian: bool = False, unitary: bool = False) -> "DenseOperator":
        return cls(entries=m, hermitian=hermitian, unitary=unitary)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def dagger(self) -> "DenseOperator":
        return DenseOperator(
            entries=self.entries.conj().T, n_qubits=self.n_qubits, hermitian=self.hermitian, unitary=self.unitary
        )

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        if other.n_qubits != self.n_qubits:
            raise DimensionError(f"cannot multiply {self.n_qubits}-qubit and {other.n_qubits}-qubit operators")
        return DenseOperator(
            entries=self.entries @ other.entries,
            n_qubits=self.n_qubits,
            unitary=self.unitary and other.unitary,
        )


def identity(n_qubits: int) -> DenseOperator:
    return DenseOperator(entries=np.eye(2**n_qubits), n_qubits=n_qubits, hermitian=True, unitary=True)


def kron(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    """Tensor product ``a ⊗ b``; ``a`` occupies the leading (more significant) qubits.

    Raises:
        DimensionError: If the product would exceed ``MAX_QUBITS``.
    """
    n = a.n_qubits + b.n_qubits
    if n > MAX_QUBITS:
        raise DimensionError(f"kron of {a.n_qubits} and {b.n_qubits} qubits exceeds the maximum of {MAX_QUBITS}")
    return DenseOperator(
        entries=np.kron(a.entries, b.entries),
        n_qubits=n,
        hermitian=a.hermitian and b.hermitian,
        unitary=a.unitary and b.unitary,
    )


def kron_all(*ops: DenseOperator) -> DenseOperator:
    """Left-to-right tensor product of several operators."""
    if not ops:
        raise DimensionError("kron_all needs at least one operator")
    return reduce(kron, ops)


def hermitian_eig(h: DenseOperator) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Eigen-decomposition ``h = V diag(w) V†`` of a Hermitian operator.

    Raises:
        NotHermitianError: If ``h`` is not Hermitian within the structural tolerance.
    """
    if not h.hermitian and not is_hermitian(h.entries):
        raise NotHermitianError(f"generator deviates from Hermitian by {_max_dev(h.entries - h.entries.conj().T):.3e}")
    w, v = np.linalg.eigh(h.entries)
    return w, v


def matexp_i(h: DenseOperator, t: float) -> DenseOperator:
    """Unitary ``exp(i h t)`` via the Hermitian eigen-decomposition of ``h``.

    Raises:
        NotHermitianError: If ``h`` is not Hermitian.
    """
    w, v = hermitian_eig(h)
    u = (v * np.exp(1j * w * t)) @ v.conj().T
    return DenseOperator(entries=u, n_qubits=h.n_qubits, unitary=True)


def apply(op: DenseOperator, state: StateVector) -> StateVector:
    """Apply a unitary to a state."""
    if op.n_qubits != state.n_qubits:
        raise DimensionError(f"{op.n_qubits}-qubit operator applied to {state.n_qubits}-qubit state")
    return StateVector(amplitudes=op.entries @ state.amplitudes, n_qubits=state.n_qubits)


def expectation(state: StateVector, op: DenseOperator) -> complex:
    """``<psi| op |psi>``.

    Raises:
        DimensionError: On a qubit-count mismatch.
    """
    if op.n_qubits != state.n_qubits:
        raise DimensionError(f"{op.n_qubits}-qubit operator measured on {state.n_qubits}-qubit state")
    psi = state.amplitudes
    return complex(np.vdot(psi, op.entries @ psi))


def commutator_norm(a: DenseOperator | NDArray[np.complex128], b: DenseOperator | NDArray[np.complex128]) -> float:
    """Largest absolute entry of ``[a, b] = ab - ba``."""
    ma = a.entries if isinstance(a, DenseOperator) else a
    mb = b.entries if isinstance(b, DenseOperator) else b
    if ma.shape != mb.shape:
        raise DimensionError(f"commutator of shapes {ma.shape} and {mb.shape}")
    return _max_dev(ma @ mb - mb @ ma)


def product_state(factors: list[StateVector]) -> StateVector:
    """Tensor product of single- or multi-qubit states, first factor on qubit 0."""
    if not factors:
        raise DimensionError("product_state needs at least one factor")
    n = sum(f.n_qubits for f in factors)
    if n > MAX_QUBITS:
        raise DimensionError(f"{n} qubits exceed the configured maximum of {MAX_QUBITS}")
    amps = reduce(np.kron, (f.amplitudes for f in factors))
    return StateVector(amplitudes=amps, n_qubits=n)


def require_projector(m: NDArray[np.complex128], what: str = "operator") -> None:
    """Raise ``NotProjectorError`` unless ``m`` is an orthogonal projector."""
    if not is_projector(m):
        dev = _max_dev(m @ m - m)
        raise NotProjectorError(f"{what} is not a projector (max |P^2 - P| = {dev:.3e})")
