# cython: language_level=3
"""Compiled hot kernels: batched re-uploading circuit evaluation and
sorted-feature split scans.  Semantics mirror numpy_backend exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

NAME = "compiled"


def dru_expectations(theta, x, int n_qubits, int n_layers):
    """All-qubit <Z> after the re-uploading circuit, per sample.

    theta: flat float64 of length 3*n_qubits*n_layers; x: (batch, n_qubits)
    float64.  Returns (batch, n_qubits) float64.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=3] th = \
        np.ascontiguousarray(theta, dtype=np.float64).reshape(n_layers, n_qubits, 3)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] xs = \
        np.ascontiguousarray(x, dtype=np.float64)
    cdef int batch = xs.shape[0]
    cdef int dim = 1 << n_qubits
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = \
        np.empty((batch, n_qubits), dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] buf = \
        np.empty(dim, dtype=np.complex128)

    cdef double complex[::1] amp = buf
    cdef double[:, :, ::1] t = th
    cdef double[:, ::1] xv = xs
    cdef double[:, ::1] ov = out

    cdef int s, layer, q, c, tgt, i, j, half, mask, low
    cdef double a, b, cc, ca, sa, cb, sb, cz, sz, xq, p, sign_sum
    cdef double complex u00, u01, u10, u11, ez, ezc, m00, m01, m10, m11
    cdef double complex a0, a1, tmp

    for s in range(batch):
        for i in range(dim):
            amp[i] = 0.0
        amp[0] = 1.0
        for layer in range(n_layers):
            for q in range(n_qubits):
                xq = xv[s, q]
                a = t[layer, q, 0] + xq
                b = t[layer, q, 1] + xq
                cc = t[layer, q, 2] + xq
                ca = cos(a * 0.5); sa = sin(a * 0.5)
                cb = cos(b * 0.5); sb = sin(b * 0.5)
                cz = cos(cc * 0.5); sz = sin(cc * 0.5)
                # RZ(c) @ RY(b) @ RX(a)
                m00 = cb * ca + 1j * (sb * sa)
                m01 = -(sb * ca) - 1j * (cb * sa)
                m10 = sb * ca - 1j * (cb * sa)
                m11 = cb * ca - 1j * (sb * sa)
                ez = cz - 1j * sz
                ezc = cz + 1j * sz
                u00 = ez * m00; u01 = ez * m01
                u10 = ezc * m10; u11 = ezc * m11
                half = 1 << q
                for i in range(dim):
                    if i & half:
                        continue
                    j = i | half
                    a0 = amp[i]
                    a1 = amp[j]
                    amp[i] = u00 * a0 + u01 * a1
                    amp[j] = u10 * a0 + u11 * a1
            # ring entangler: CNOT(q, (q+1) mod n) in order; none for 1 qubit
            for q in range(n_qubits if n_qubits >= 2 else 0):
                c = q
                tgt = (q + 1) % n_qubits
                half = 1 << tgt
                mask = 1 << c
                for i in range(dim):
                    if (i & mask) and not (i & half):
                        j = i | half
                        tmp = amp[i]
                        amp[i] = amp[j]
                        amp[j] = tmp
        for q in range(n_qubits):
            half = 1 << q
            sign_sum = 0.0
            for i in range(dim):
                p = amp[i].real * amp[i].real + amp[i].imag * amp[i].imag
                if i & half:
                    sign_sum -= p
                else:
                    sign_sum += p
            ov[s, q] = sign_sum
    return out


def best_split_sse(x_sorted, t_sorted, int min_leaf):
    """Best split position of an ascending-sorted feature by SSE reduction.

    Returns (gain, pos); (0.0, -1) when no valid split exists.  Ties pick
    the smallest pos.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = \
        np.ascontiguousarray(x_sorted, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ta = \
        np.ascontiguousarray(t_sorted, dtype=np.float64)
    cdef double[::1] x = xa
    cdef double[::1] t = ta
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, best_pos
    cdef double left_sum, total, parent, gain, best_gain

    if n < 2 * min_leaf:
        return 0.0, -1
    total = 0.0
    for i in range(n):
        total += t[i]
    parent = total * total / n
    best_gain = 0.0
    best_pos = -1
    left_sum = 0.0
    for i in range(1, n - min_leaf + 1):
        left_sum += t[i - 1]
        if i < min_leaf:
            continue
        if x[i] <= x[i - 1]:
            continue
        gain = (left_sum * left_sum / i
                + (total - left_sum) * (total - left_sum) / (n - i)
                - parent)
        if gain > best_gain:
            best_gain = gain
            best_pos = i
    if best_pos < 0:
        return 0.0, -1
    return best_gain, best_pos
