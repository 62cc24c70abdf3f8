"""Exact state-vector quantum mechanics for small qubit registers.

Conventions used throughout the package:

* qubit 0 is the most significant bit of the amplitude index, so for three
  qubits the basis order is |000>, |001>, ..., |111|.
* a measurement along a Bloch direction n returns the bit r whose eigenvalue
  is (-1)**r, i.e. outcome 0 is the +1 eigenstate of n.sigma.
* sigma_y = [[0, -i], [i, 0]] (standard sign).

All values are immutable; only `measure_and_collapse` consumes randomness,
through an explicit seed or numpy Generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError

ATOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def as_generator(rng):
    """Coerce a seed into a Generator; pass through any uniform source.

    Anything exposing `.random()` (a numpy Generator, or a replay/stub source
    in tests) is used as-is.
    """
    if callable(getattr(rng, "random", None)):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class BlochDirection:
    """Unit vector on the Bloch sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(norm - 1.0) > 1e-12:
            raise ContractError(f"Bloch direction must be unit length, got |n|^2 = {norm!r}")

    @classmethod
    def from_azimuth(cls, phi: float) -> "BlochDirection":
        """Direction (cos phi, sin phi, 0) in the equatorial x-y plane."""
        return cls(math.cos(phi), math.sin(phi), 0.0)

    def flipped(self) -> "BlochDirection":
        return BlochDirection(-self.x, -self.y, -self.z)

    def matrix(self) -> np.ndarray:
        """The observable n.sigma."""
        return self.x * PAULI_X + self.y * PAULI_Y + self.z * PAULI_Z

    def projector(self, outcome: int) -> np.ndarray:
        """Projector onto the (-1)**outcome eigenspace of n.sigma."""
        if outcome not in (0, 1):
            raise ContractError(f"outcome must be 0 or 1, got {outcome!r}")
        sign = 1.0 if outcome == 0 else -1.0
        return (_I2 + sign * self.matrix()) / 2.0


X_DIR = BlochDirection(1.0, 0.0, 0.0)
Y_DIR = BlochDirection(0.0, 1.0, 0.0)
Z_DIR = BlochDirection(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state of `qubit_count` qubits."""

    amplitudes: np.ndarray
    qubit_count: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        if amps.shape[0] != 2**self.qubit_count:
            raise ContractError(
                f"expected 2**{self.qubit_count} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ContractError(f"state is not normalized: |psi|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(math.log2(amps.shape[0])))
        return cls(amps, n)

    def equals_up_to_phase(self, other: "StateVector", tol: float = 1e-9) -> bool:
        """Ray equality: |<self|other>| = 1 within tol."""
        if self.qubit_count != other.qubit_count:
            return False
        return abs(abs(np.vdot(self.amplitudes, other.amplitudes)) - 1.0) <= tol


def basis_state(bits: tuple[int, ...] | list[int]) -> StateVector:
    """Computational basis state |b0 b1 ... >, qubit 0 first."""
    n = len(bits)
    amps = np.zeros(2**n, dtype=complex)
    idx = 0
    for b in bits:
        idx = (idx << 1) | (b & 1)
    amps[idx] = 1.0
    return StateVector(amps, n)


def ghz_state() -> StateVector:
    """The three-qubit state (|000> + |111>)/sqrt(2)."""
    amps = np.zeros(8, dtype=complex)
    amps[0] = amps[7] = 1.0 / math.sqrt(2.0)
    return StateVector(amps, 3)


def _apply_on_qubit(amps: np.ndarray, mat: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a 2x2 operator on one qubit of a 2**n amplitude vector."""
    t = amps.reshape([2] * n)
    t = np.moveaxis(t, qubit, -1)
    t = t @ mat.T
    return np.moveaxis(t, -1, qubit).reshape(-1)


def _check_settings(state: StateVector, settings) -> None:
    seen = set()
    for qubit, _direction, outcome in settings:
        if not 0 <= qubit < state.qubit_count:
            raise ContractError(f"qubit index {qubit} out of range for {state.qubit_count} qubits")
        if qubit in seen:
            raise ContractError(f"duplicate qubit index {qubit} in measurement settings")
        if outcome not in (0, 1):
            raise ContractError(f"outcome must be 0 or 1, got {outcome!r}")
        seen.add(qubit)


def joint_probability(
    state: StateVector,
    settings: list[tuple[int, BlochDirection, int]],
) -> float:
    """Born probability of observing the given joint outcome.

    `settings` lists (qubit index, measurement direction, outcome bit); qubits
    not mentioned are left unmeasured (marginalized).
    """
    _check_settings(state, settings)
    amps = state.amplitudes
    for qubit, direction, outcome in settings:
        amps = _apply_on_qubit(amps, direction.projector(outcome), qubit, state.qubit_count)
    p = float(np.sum(np.abs(amps) ** 2))
    return min(max(p, 0.0), 1.0)


def collapse(state: StateVector, qubit: int, direction: BlochDirection, outcome: int) -> StateVector:
    """Renormalized projection of `state` after observing `outcome` on `qubit`."""
    _check_settings(state, [(qubit, direction, outcome)])
    amps = _apply_on_qubit(state.amplitudes, direction.projector(outcome), qubit, state.qubit_count)
    norm = float(np.sum(np.abs(amps) ** 2))
    if norm <= ATOL:
        raise ContractError(
            f"cannot collapse onto a zero-probability branch (outcome {outcome}, p = {norm!r})"
        )
    return StateVector(amps / math.sqrt(norm), state.qubit_count)


def measure_and_collapse(
    state: StateVector,
    qubit: int,
    direction: BlochDirection,
    rng: np.random.Generator | int | None = None,
) -> tuple[int, StateVector]:
    """Sample one projective measurement and return (outcome, post-measurement state)."""
    gen = as_generator(rng)
    p0 = joint_probability(state, [(qubit, direction, 0)])
    outcome = 0 if gen.random() < p0 else 1
    return outcome, collapse(state, qubit, direction, outcome)
