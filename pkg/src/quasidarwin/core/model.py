"""System-environment Hamiltonian, its propagators and Heisenberg-evolved projectors.

The model couples a system qubit S (qubit 0) to ``n_env`` environment qubits E_1..E_N
(qubits 1..N)::

    H = (Δ/2) X_S + (Ω/2) Z_S + X_S Σ_i J_i X_{E_i}

Every X_{E_i} commutes with H. For Ω = 0 all four terms commute as well, the system's X
eigenbasis is a pointer basis, and records of it proliferate redundantly into the
environment.
"""

import logging
from functools import lru_cache
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from quasidarwin.constants import DEFAULT_COUPLING, DEFAULT_DELTA, DEFAULT_N_ENV, MAX_QUBITS
from quasidarwin.core.exceptions import DimensionError
from quasidarwin.core.numerics import (
    PAULI_X,
    PAULI_Z,
    DenseOperator,
    hermitian_eig,
    require_projector,
)

__all__ = [
    "ModelParams",
    "build_hamiltonian",
    "embed_single",
    "heisenberg_project",
    "interaction_operator",
    "is_darwinistic",
    "propagator",
    "spectrum",
    "system_hamiltonian",
]

logger = logging.getLogger(__name__)


class ModelParams(BaseModel):
    """Hamiltonian parameters: system field ``delta``, transverse field ``omega`` and couplings ``J_i``."""

    model_config = ConfigDict(frozen=True)

    delta: float = DEFAULT_DELTA
    omega: float = Field(default=0.0, ge=0.0)
    couplings: tuple[float, ...] = (DEFAULT_COUPLING,) * DEFAULT_N_ENV
    n_env: int = Field(default=DEFAULT_N_ENV, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _infer_n_env(cls, data: object) -> object:
        if isinstance(data, dict) and "n_env" not in data and data.get("couplings") is not None:
            data = {**data, "n_env": len(data["couplings"])}
        return data

    @model_validator(mode="after")
    def _check(self) -> Self:
        if len(self.couplings) != self.n_env:
            raise ValueError(f"n_env={self.n_env} but {len(self.couplings)} couplings given")
        if self.n_qubits > MAX_QUBITS:
            raise DimensionError(f"{self.n_qubits} model qubits exceed the configured maximum of {MAX_QUBITS}")
        return self

    @property
    def n_qubits(self) -> int:
        return 1 + self.n_env

    def with_omega(self, omega: float) -> "ModelParams":
        return self.model_copy(update={"omega": omega})


def embed_single(op2: NDArray[np.complex128], site: int, n_total: int) -> NDArray[np.complex128]:
    """Matrix of a single-qubit operator acting on ``site`` of ``n_total`` qubits."""
    if not 0 <= site < n_total:
        raise DimensionError(f"site {site} out of range for {n_total} qubits")
    left = np.eye(2**site)
    right = np.eye(2 ** (n_total - site - 1))
    return np.kron(np.kron(left, op2), right)


def system_hamiltonian(params: ModelParams) -> NDArray[np.complex128]:
    """Single-qubit system part ``(Δ/2) X + (Ω/2) Z``."""
    return 0.5 * params.delta * PAULI_X + 0.5 * params.omega * PAULI_Z


def interaction_operator(params: ModelParams) -> NDArray[np.complex128]:
    """Environment factor ``V = Σ_i J_i X_{E_i}`` of the interaction ``X_S ⊗ V``."""
    n = params.n_env
    v = np.zeros((2**n, 2**n), dtype=np.complex128)
    for i, j in enumerate(params.couplings):
        v += j * embed_single(PAULI_X, i, n)
    return v


def build_hamiltonian(params: ModelParams) -> DenseOperator:
    """Hamiltonian on ``1 + n_env`` qubits with the system as qubit 0."""
    env_identity = np.eye(2**params.n_env)
    h = np.kron(system_hamiltonian(params), env_identity) + np.kron(PAULI_X, interaction_operator(params))
    # Exact symmetrisation; all terms are real-symmetric or Hermitian Paulis
    h = 0.5 * (h + h.conj().T)
    return DenseOperator(entries=h, n_qubits=params.n_qubits, hermitian=True)


@lru_cache(maxsize=64)
def spectrum(params: ModelParams) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Cached eigen-decomposition ``H = V diag(E) V†``; returned arrays are read-only."""
    w, v = hermitian_eig(build_hamiltonian(params))
    w.setflags(write=False)
    v.setflags(write=False)
    logger.debug("Diagonalised H for %s: E in [%.4f, %.4f]", params, w[0], w[-1])
    return w, v


def _evolution(params: ModelParams, t: float) -> NDArray[np.complex128]:
    # exp(i H t)
    w, v = spectrum(params)
    return (v * np.exp(1j * w * t)) @ v.conj().T


def propagator(params: ModelParams, t: float) -> DenseOperator:
    """Schrödinger propagator ``exp(-i H t)``."""
    if t == 0:
        return DenseOperator(entries=np.eye(2**params.n_qubits), n_qubits=params.n_qubits, hermitian=True, unitary=True)
    return DenseOperator(entries=_evolution(params, -t), n_qubits=params.n_qubits, unitary=True)


def heisenberg_project(proj: DenseOperator, params: ModelParams, t: float) -> DenseOperator:
    """Heisenberg-evolved projector ``exp(iHt) P exp(-iHt)``; ``t == 0`` returns ``proj`` itself.

    Raises:
        NotProjectorError: If ``proj`` is not a projector.
        DimensionError: If ``proj`` does not act on the model's qubits.
    """
    require_projector(proj.entries, "measurement operator")
    if proj.n_qubits != params.n_qubits:
        raise DimensionError(f"{proj.n_qubits}-qubit projector for a {params.n_qubits}-qubit model")
    if t == 0:
        return proj
    w = _evolution(params, t)
    evolved = w @ proj.entries @ w.conj().T
    return DenseOperator(entries=0.5 * (evolved + evolved.conj().T), n_qubits=proj.n_qubits, hermitian=True)


def is_darwinistic(params: ModelParams) -> bool:
    """Whether the model supports a pointer basis, i.e. ``omega == 0`` exactly.

    The comparison is exact: any nonzero transverse field, however small, makes the
    system Hamiltonian fail to commute with the interaction. Coupling degeneracy
    (e.g. ``J_1 == J_2``) is ignored; the statement that redundant records form for
    continuously distributed couplings concerns large environments and late times,
    not the few-qubit instances simulated here.
    """
    return params.omega == 0.0
