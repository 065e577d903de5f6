"""Pure-state statevector simulator.

Conventions (fixed, tested):
  * little-endian amplitude ordering: qubit 0 is the least significant bit
    of the basis-state index;
  * rotations follow exp(-i*theta*P/2) for P in {X, Y, Z};
  * expectations are computed exactly from amplitudes, never sampled.

This module is the readable reference implementation.  Batched circuit
evaluation for the classifier hot path lives in :mod:`uavqad.kernels` and is
tested against this one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 24

_ROTATIONS = ("RX", "RY", "RZ")


@dataclass(frozen=True)
class Gate:
    """One gate of the supported set: RX/RY/RZ rotations and CNOT.

    ``control`` is present iff ``kind`` is CNOT; ``angle`` (radians) is
    present iff ``kind`` is a rotation.
    """

    kind: str
    target: int
    control: int | None = None
    angle: float | None = None

    def __post_init__(self):
        if self.kind in _ROTATIONS:
            if self.control is not None:
                raise ValueError(f"{self.kind} takes no control qubit")
            if self.angle is None:
                raise ValueError(f"{self.kind} requires an angle")
        elif self.kind == "CNOT":
            if self.control is None:
                raise ValueError("CNOT requires a control qubit")
            if self.angle is not None:
                raise ValueError("CNOT takes no angle")
            if self.control == self.target:
                raise ValueError("CNOT control and target must differ")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")


class Statevector:
    """State of ``n_qubits`` qubits as 2**n_qubits complex amplitudes."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())


def init_zero(n_qubits: int) -> Statevector:
    """All-qubits-|0> state."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


def _check_qubit(q: int, n: int, name: str = "qubit"):
    if not 0 <= q < n:
        raise ValueError(f"{name} index {q} out of range for {n} qubits")


def _apply_1q(amps: np.ndarray, u: np.ndarray, target: int, n: int) -> np.ndarray:
    # View as (high bits, target bit, low bits); little-endian puts the
    # target stride at 2**target.
    view = amps.reshape(2 ** (n - target - 1), 2, 2**target)
    a0 = view[:, 0, :]
    a1 = view[:, 1, :]
    new0 = u[0, 0] * a0 + u[0, 1] * a1
    new1 = u[1, 0] * a0 + u[1, 1] * a1
    out = np.empty_like(view)
    out[:, 0, :] = new0
    out[:, 1, :] = new1
    return out.reshape(-1)


def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    """2x2 unitary for exp(-i*angle*P/2)."""
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "RZ":
        return np.array(
            [[np.exp(-1j * angle / 2.0), 0.0], [0.0, np.exp(1j * angle / 2.0)]],
            dtype=np.complex128,
        )
    raise ValueError(f"not a rotation: {kind!r}")


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Return the state after one gate (input state is not modified)."""
    n = state.n_qubits
    _check_qubit(gate.target, n, "target")
    if gate.kind in _ROTATIONS:
        u = rotation_matrix(gate.kind, gate.angle)
        return Statevector(n, _apply_1q(state.amplitudes, u, gate.target, n))
    # CNOT: swap amplitude pairs where the control bit is set.
    _check_qubit(gate.control, n, "control")
    amps = state.amplitudes.copy()
    idx = np.arange(amps.shape[0])
    ctrl_set = (idx >> gate.control) & 1 == 1
    src = idx[ctrl_set]
    amps[src] = state.amplitudes[src ^ (1 << gate.target)]
    return Statevector(n, amps)


def apply_circuit(state: Statevector, gates) -> Statevector:
    for g in gates:
        state = apply_gate(state, g)
    return state


def ring_entangler_gates(n_qubits: int) -> list[Gate]:
    """CNOT(q, (q+1) mod n) for q = 0..n-1, in that order."""
    if n_qubits < 2:
        raise ValueError("ring entangler needs at least 2 qubits")
    return [Gate("CNOT", target=(q + 1) % n_qubits, control=q) for q in range(n_qubits)]


def apply_ring_entangler(state: Statevector) -> Statevector:
    return apply_circuit(state, ring_entangler_gates(state.n_qubits))


def expect_z(state: Statevector, qubit: int) -> float:
    """<Z_q> = sum over basis states of |amp|^2 * (+1 if bit q is 0 else -1)."""
    _check_qubit(qubit, state.n_qubits)
    probs = np.abs(state.amplitudes) ** 2
    idx = np.arange(probs.shape[0])
    signs = 1.0 - 2.0 * ((idx >> qubit) & 1)
    return float(np.dot(probs, signs))


def basis_state(n_qubits: int, bits: str) -> Statevector:
    """State |bits> with bits written qubit 0 first (e.g. '10000' sets qubit 0)."""
    if len(bits) != n_qubits:
        raise ValueError("bit string length must equal n_qubits")
    index = 0
    for q, b in enumerate(bits):
        if b == "1":
            index |= 1 << q
        elif b != "0":
            raise ValueError(f"invalid bit {b!r}")
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return Statevector(n_qubits, amps)
