"""NumPy implementations of the two hot kernels.

Semantics match :mod:`uavqad.kernels._fastcore` exactly; this backend is the
fallback when the compiled extension is unavailable and the baseline the
extension is benchmarked against.

Kernel 1 -- batched re-uploading circuit evaluation: the per-qubit RX/RY/RZ
triple is fused into one 2x2 unitary per (sample, qubit) and the ring of
CNOTs into one index permutation per layer.

Kernel 2 -- best split of a sorted feature by sum-of-squared-error reduction
(equivalent to Gini gain for 0/1 targets, up to a constant factor).
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

_RING_PERM_CACHE: dict[int, np.ndarray] = {}
_Z_SIGN_CACHE: dict[int, np.ndarray] = {}


def _ring_permutation(n_qubits: int) -> np.ndarray:
    """Composite index map of CNOT(q, (q+1) mod n) for q = 0..n-1 in order.

    If sigma_g(j) is the source index feeding amplitude j under gate g, the
    sequence g1..gk composes to sigma_1(sigma_2(...sigma_k(j))).
    """
    perm = _RING_PERM_CACHE.get(n_qubits)
    if perm is not None:
        return perm
    dim = 2**n_qubits
    idx = np.arange(dim)
    perm = idx
    for q in range(n_qubits):
        control, target = q, (q + 1) % n_qubits
        sigma = idx ^ (((idx >> control) & 1) << target)
        perm = perm[sigma] if q > 0 else sigma
    _RING_PERM_CACHE[n_qubits] = perm
    return perm


def _z_signs(n_qubits: int) -> np.ndarray:
    """(2**n, n) matrix of +/-1: column q is the Z eigenvalue of qubit q."""
    signs = _Z_SIGN_CACHE.get(n_qubits)
    if signs is not None:
        return signs
    idx = np.arange(2**n_qubits)
    signs = np.empty((2**n_qubits, n_qubits), dtype=np.float64)
    for q in range(n_qubits):
        signs[:, q] = 1.0 - 2.0 * ((idx >> q) & 1)
    _Z_SIGN_CACHE[n_qubits] = signs
    return signs


def _fused_rotation(a, b, c):
    """Entries of RZ(c) @ RY(b) @ RX(a), batched over the angle arrays."""
    ca, sa = np.cos(a / 2.0), np.sin(a / 2.0)
    cb, sb = np.cos(b / 2.0), np.sin(b / 2.0)
    m00 = cb * ca + 1j * (sb * sa)
    m01 = -(sb * ca) - 1j * (cb * sa)
    m10 = sb * ca - 1j * (cb * sa)
    m11 = cb * ca - 1j * (sb * sa)
    ez = np.exp(-0.5j * c)
    ezc = np.conj(ez)
    return ez * m00, ez * m01, ezc * m10, ezc * m11


def dru_expectations(
    theta: np.ndarray, x: np.ndarray, n_qubits: int, n_layers: int
) -> np.ndarray:
    """All-qubit <Z> after the re-uploading circuit, for a batch of inputs.

    theta is flat of length 3*n_qubits*n_layers; x has shape
    (batch, n_qubits).  Returns shape (batch, n_qubits) float64.
    """
    th = np.asarray(theta, dtype=np.float64).reshape(n_layers, n_qubits, 3)
    x = np.asarray(x, dtype=np.float64)
    batch = x.shape[0]
    dim = 2**n_qubits
    amps = np.zeros((batch, dim), dtype=np.complex128)
    amps[:, 0] = 1.0
    # A single qubit has no ring to entangle.
    perm = _ring_permutation(n_qubits) if n_qubits >= 2 else None
    for layer in range(n_layers):
        for q in range(n_qubits):
            xa = x[:, q]
            u00, u01, u10, u11 = _fused_rotation(
                th[layer, q, 0] + xa, th[layer, q, 1] + xa, th[layer, q, 2] + xa
            )
            view = amps.reshape(batch, 2 ** (n_qubits - q - 1), 2, 2**q)
            a0 = view[:, :, 0, :]
            a1 = view[:, :, 1, :]
            new0 = u00[:, None, None] * a0 + u01[:, None, None] * a1
            new1 = u10[:, None, None] * a0 + u11[:, None, None] * a1
            view[:, :, 0, :] = new0
            view[:, :, 1, :] = new1
        if perm is not None:
            amps = amps[:, perm]
    probs = amps.real**2 + amps.imag**2
    return probs @ _z_signs(n_qubits)


def best_split_sse(
    x_sorted: np.ndarray, t_sorted: np.ndarray, min_leaf: int
) -> tuple[float, int]:
    """Best split position of an ascending-sorted feature.

    Returns (gain, pos) where pos is the left-partition size, so the split
    separates indices [0, pos) from [pos, n).  gain is the SSE reduction
    relative to the unsplit node; (0.0, -1) when no valid split exists.
    Ties pick the smallest pos, i.e. the lowest threshold.
    """
    n = x_sorted.shape[0]
    if n < 2 * min_leaf:
        return 0.0, -1
    cs = np.cumsum(t_sorted)
    total = cs[-1]
    pos = np.arange(min_leaf, n - min_leaf + 1)
    left_sum = cs[pos - 1]
    right_sum = total - left_sum
    gain = left_sum**2 / pos + right_sum**2 / (n - pos) - total**2 / n
    gain[x_sorted[pos] <= x_sorted[pos - 1]] = -np.inf
    j = int(np.argmax(gain))
    if not np.isfinite(gain[j]) or gain[j] <= 0.0:
        return 0.0, -1
    return float(gain[j]), int(pos[j])
