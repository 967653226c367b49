"""Pauli-string algebra on dense vectors and matrices.

Conventions used throughout the package:

* Qubit 0 is the most significant bit of a computational-basis index,
  so qubit ``j`` of an ``n``-qubit register carries integer weight
  ``2**(n-1-j)``.
* A Hermitian Pauli string is parametrized by x-bits ``x``, z-bits ``z``
  and a sign bit ``s`` as ``P = (-1)**s * i**(x.z) * X^x Z^z``.  With
  this normalization ``P`` is Hermitian, squares to the identity and
  acts on a basis state as a phase-decorated bit-flip permutation.
"""

from __future__ import annotations

import numpy as np

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PHASE_S = np.array([[1, 0], [0, 1j]], dtype=complex)

PAULIS = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


def bit_weights(n: int) -> np.ndarray:
    """Integer weight of each qubit's bit, qubit 0 first (most significant)."""
    return 1 << np.arange(n - 1, -1, -1, dtype=np.int64)


def bits_to_index(bits) -> int:
    """Pack per-qubit bits (qubit 0 first) into a basis index."""
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    return idx


def index_to_bits(index: int, n: int) -> np.ndarray:
    """Unpack a basis index into per-qubit bits, qubit 0 first."""
    return (index >> np.arange(n - 1, -1, -1)) & 1


def pauli_dense(x_bits, z_bits, sign: int = 0) -> np.ndarray:
    """Dense matrix of the Hermitian Pauli string (-1)^sign i^{x.z} X^x Z^z."""
    x_bits = np.asarray(x_bits, dtype=np.uint8)
    z_bits = np.asarray(z_bits, dtype=np.uint8)
    out = np.array([[1.0]], dtype=complex)
    for xb, zb in zip(x_bits, z_bits):
        key = ("I", "X", "Z", "Y")[xb + 2 * zb]
        factor = PAULIS[key] if key != "Y" else PAULI_Y
        out = np.kron(out, factor)
    # i^{x.z} matches the i absorbed into each Y = i X Z factor; only the
    # explicit sign bit remains.
    if sign:
        out = -out
    return out


def phase_permutation(x_bits, z_bits, sign: int, n: int):
    """Permutation form of a Hermitian Pauli string.

    Returns ``(ix, c)`` with ``(P v)[i] = c[i ^ ix] * v[i ^ ix]`` for a
    state vector ``v`` of length ``2**n``.
    """
    w = bit_weights(n)
    x_bits = np.asarray(x_bits, dtype=np.int64)
    z_bits = np.asarray(z_bits, dtype=np.int64)
    ix = int(x_bits @ w)
    iz = int(z_bits @ w)
    xz = int(x_bits @ z_bits)
    ell = np.arange(1 << n, dtype=np.int64)
    par = np.bitwise_count(ell & iz) & 1
    c = (1j ** (xz % 4)) * (1.0 - 2.0 * par)
    if sign:
        c = -c
    return ix, c


def apply_pauli(vec: np.ndarray, x_bits, z_bits, sign: int = 0) -> np.ndarray:
    """Apply a Hermitian Pauli string to a state vector."""
    n = int(np.log2(vec.shape[0]))
    ix, c = phase_permutation(x_bits, z_bits, sign, n)
    idx = np.arange(vec.shape[0]) ^ ix
    return c[idx] * vec[idx]


def identify_pauli(mat: np.ndarray, atol: float = 1e-10):
    """Recognize a dense matrix as a signed Pauli string.

    Returns ``(x_bits, z_bits, sign)`` such that
    ``mat == (-1)^sign i^{x.z} X^x Z^z`` within ``atol``; raises
    ``ValueError`` if the matrix is not of that form.
    """
    d = mat.shape[0]
    n = int(np.log2(d))
    col0 = mat[:, 0]
    ix = int(np.argmax(np.abs(col0)))
    ks = np.arange(d)
    c = mat[ks ^ ix, ks]
    if np.min(np.abs(c)) < 0.5:
        raise ValueError("matrix is not a Pauli permutation")
    x_bits = index_to_bits(ix, n).astype(np.uint8)
    z_bits = np.zeros(n, dtype=np.uint8)
    for j in range(n):
        ratio = c[1 << (n - 1 - j)] / c[0]
        if abs(ratio - 1) > 0.5 and abs(ratio + 1) > 0.5:
            raise ValueError("matrix is not a Pauli string")
        if ratio.real < 0:
            z_bits[j] = 1
    xz = int(x_bits.astype(int) @ z_bits.astype(int))
    lead = c[0] / (1j ** (xz % 4))
    if abs(lead - 1) <= 0.5:
        sign = 0
    elif abs(lead + 1) <= 0.5:
        sign = 1
    else:
        raise ValueError("matrix is not a Hermitian Pauli string")
    check = pauli_dense(x_bits, z_bits, sign)
    if np.max(np.abs(check - mat)) > atol:
        raise ValueError("matrix deviates from the identified Pauli string")
    return x_bits, z_bits, sign
