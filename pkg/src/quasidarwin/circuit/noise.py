"""Stochastic Pauli noise for statevector trajectories.

Per gate, with probability ``p1`` (single-qubit gates) or ``p2`` (multi-qubit gates), a
uniformly random non-identity Pauli string is applied on the gate's qubits. When T1/T2 are
given, each qubit a gate touches also suffers the Pauli-twirled amplitude/phase decay of
the gate duration::

    p_x = p_y = (1 - exp(-t/T1)) / 4
    p_z = max(0, (1 - exp(-t/T2)) / 2 - p_x)

The measured qubit decays for the readout time before a classical bit flip with
probability ``p_readout``, folded into the ancilla probability as
``P'(0) = (1 - 2 p_readout) P(0) + p_readout``.
"""

import logging
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from quasidarwin.circuit.gates import Gate, apply_matrix
from quasidarwin.core.exceptions import ConfigError
from quasidarwin.core.numerics import IDENTITY_2, PAULI_X, PAULI_Y, PAULI_Z
from quasidarwin.reference import DeviceParameters, load_reference

__all__ = [
    "NOISE_ALIASES",
    "NoiseModel",
    "apply_decay",
    "apply_gate_noise",
    "noise_preset",
    "preset_names",
]

logger = logging.getLogger(__name__)

_PAULIS = (np.asarray(IDENTITY_2), np.asarray(PAULI_X), np.asarray(PAULI_Y), np.asarray(PAULI_Z))

NOISE_ALIASES = {
    "ibm": "ibm-torino",
    "ionq": "ionq-aria",
    "table4-ibm": "ibm-torino",
    "table4-ionq": "ionq-aria",
}


class NoiseModel(BaseModel):
    """Gate depolarizing probabilities, readout flip and optional T1/T2 decay (times in seconds)."""

    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    p1: float = Field(default=0.0, ge=0.0, le=1.0)
    p2: float = Field(default=0.0, ge=0.0, le=1.0)
    p_readout: float = Field(default=0.0, ge=0.0, le=1.0)
    t1: float | None = Field(default=None, gt=0.0)
    t2: float | None = Field(default=None, gt=0.0)
    time_1q: float = Field(default=0.0, ge=0.0)
    time_2q: float = Field(default=0.0, ge=0.0)
    time_readout: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if (self.t1 is None) != (self.t2 is None):
            raise ValueError("t1 and t2 must be given together")
        return self

    @classmethod
    def from_device(cls, name: str, device: DeviceParameters) -> "NoiseModel":
        return cls(
            name=name,
            p1=device.error_1q,
            p2=device.error_2q,
            p_readout=device.error_readout,
            t1=device.t1,
            t2=device.t2,
            time_1q=device.time_1q,
            time_2q=device.time_2q,
            time_readout=device.time_readout,
        )

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == 0 and self.p2 == 0 and self.p_readout == 0 and self.t1 is None

    def scaled(self, factor: float) -> "NoiseModel":
        """Every error rate multiplied by ``factor`` (probabilities capped at 1, T1/T2 divided)."""
        return self.model_copy(
            update={
                "name": f"{self.name}x{factor:g}",
                "p1": min(1.0, self.p1 * factor),
                "p2": min(1.0, self.p2 * factor),
                "p_readout": min(0.5, self.p_readout * factor),
                "t1": None if self.t1 is None else self.t1 / factor,
                "t2": None if self.t2 is None else self.t2 / factor,
            }
        )

    def decay_probs(self, duration: float) -> tuple[float, float, float]:
        """Pauli-twirled ``(p_x, p_y, p_z)`` of idle decay over ``duration``."""
        if self.t1 is None or self.t2 is None or duration <= 0:
            return 0.0, 0.0, 0.0
        p_xy = (1 - np.exp(-duration / self.t1)) / 4
        p_z = max(0.0, (1 - np.exp(-duration / self.t2)) / 2 - p_xy)
        return float(p_xy), float(p_xy), float(p_z)

    def gate_error(self, gate: Gate) -> float:
        return self.p1 if gate.arity == 1 else self.p2

    def gate_time(self, gate: Gate) -> float:
        return self.time_1q if gate.arity == 1 else self.time_2q

    def fold_readout(self, p0: float) -> float:
        return (1 - 2 * self.p_readout) * p0 + self.p_readout


def apply_decay(
    state: NDArray[np.complex128],
    qubits: tuple[int, ...],
    duration: float,
    noise: NoiseModel,
    rng: np.random.Generator,
    n: int,
) -> NDArray[np.complex128]:
    """Sample the twirled decay channel independently on each qubit."""
    p_x, p_y, p_z = noise.decay_probs(duration)
    if p_x == p_y == p_z == 0.0:
        return state
    cumulative = np.cumsum([p_x, p_y, p_z])
    for q in qubits:
        r = rng.random()
        if r < cumulative[-1]:
            pauli = int(np.searchsorted(cumulative, r, side="right")) + 1
            state = apply_matrix(state, _PAULIS[pauli], (q,), n)
    return state


def apply_gate_noise(
    state: NDArray[np.complex128], gate: Gate, noise: NoiseModel, rng: np.random.Generator, n: int
) -> NDArray[np.complex128]:
    """Insert a random non-identity Pauli string with the gate's error probability, then gate-time decay."""
    p = noise.gate_error(gate)
    if p > 0 and rng.random() < p:
        k = gate.arity
        index = int(rng.integers(1, 4**k))
        for q in reversed(gate.qubits):
            index, digit = divmod(index, 4)
            if digit:
                state = apply_matrix(state, _PAULIS[digit], (q,), n)
    return apply_decay(state, gate.qubits, noise.gate_time(gate), noise, rng, n)


def preset_names() -> list[str]:
    return ["none", *sorted(load_reference().devices), "custom"]


def noise_preset(name: str, custom: NoiseModel | None = None) -> NoiseModel | None:
    """Resolve a noise preset name (aliases accepted); ``"none"`` gives ``None``.

    Raises:
        ConfigError: For an unknown name, or ``"custom"`` without a custom model.
    """
    name = NOISE_ALIASES.get(name, name)
    if name == "none":
        return None
    if name == "custom":
        if custom is None:
            raise ConfigError("noise preset 'custom' needs a 'custom_noise' block in the config")
        return custom
    devices = load_reference().devices
    if name not in devices:
        raise ConfigError(f"unknown noise preset {name!r}; expected one of {preset_names()} or {sorted(NOISE_ALIASES)}")
    logger.debug("Using noise preset %s", name)
    return NoiseModel.from_device(name, devices[name])
