"""Measurement-ensemble sampling: random Pauli bases and uniform Cliffords.

The Clifford sampler is exactly uniform over the n-qubit Clifford group
modulo global phase.  It combines

* a uniformly random binary symplectic matrix, produced by the
  transvection-based canonical construction of Koenig and Smolin
  ("How to efficiently select an arbitrary Clifford group element"),
  vectorized over a whole batch of samples, and
* 2n uniformly random sign bits for the images of the X_j / Z_j
  generators.

Every (symplectic matrix, sign vector) pair corresponds to exactly one
Clifford modulo phase, so the product distribution is exactly uniform.

Tableau convention: row ``j`` (0 <= j < n) holds the image of X_j under
conjugation, row ``n+j`` the image of Z_j; columns 0..n-1 are x-bits,
columns n..2n-1 are z-bits; ``phases[r]`` is the sign bit of row r.  The
matrix M satisfies M O M^T = O over GF(2) with O = [[0, I], [I, 0]].

Global phase of sampled Cliffords is fixed by an arbitrary canonical
choice in the dense conversion; measurement statistics never depend on
it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .pauliops import HADAMARD, PAULI_I, PHASE_S, bit_weights

BASIS_LETTERS = "XYZ"

# rotation mapping the designated Pauli eigenbasis onto the computational
# basis: X -> H, Y -> H S^dag, Z -> I
BASIS_ROTATIONS = {
    "X": HADAMARD,
    "Y": HADAMARD @ PHASE_S.conj().T,
    "Z": PAULI_I,
}
_ROTATIONS_BY_INDEX = np.stack([BASIS_ROTATIONS[c] for c in BASIS_LETTERS])

_EVEN_MASK = np.int64(0x5555555555555555)


@dataclass(frozen=True)
class PauliBasisString:
    """Per-qubit measurement bases, e.g. ``"XZY"`` (qubit 0 first)."""

    bases: str

    def __post_init__(self):
        if not self.bases or any(c not in BASIS_LETTERS for c in self.bases):
            raise ValueError(f"bases must be a non-empty string over XYZ, got {self.bases!r}")

    @property
    def num_qubits(self) -> int:
        return len(self.bases)

    def as_ints(self) -> np.ndarray:
        return np.frombuffer(self.bases.encode(), dtype=np.uint8) - ord("X")


@dataclass(frozen=True)
class CliffordTableau:
    """Binary symplectic representation of an n-qubit Clifford with sign bits."""

    num_qubits: int
    symplectic: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        n = self.num_qubits
        symp = np.array(self.symplectic, dtype=np.uint8) & 1
        ph = np.array(self.phases, dtype=np.uint8) & 1
        symp.setflags(write=False)
        ph.setflags(write=False)
        object.__setattr__(self, "symplectic", symp)
        object.__setattr__(self, "phases", ph)
        if symp.shape != (2 * n, 2 * n) or ph.shape != (2 * n,):
            raise ValueError("tableau arrays have wrong shape")
        if not is_symplectic(symp):
            raise ValueError("matrix violates the symplectic condition")

    def key(self) -> bytes:
        """Phase-invariant canonical identifier of the Clifford (mod phase)."""
        return self.symplectic.tobytes() + self.phases.tobytes()


UnitaryDescriptor = Union[PauliBasisString, CliffordTableau]


def symplectic_form(n: int) -> np.ndarray:
    omega = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    omega[:n, n:] = np.eye(n, dtype=np.uint8)
    omega[n:, :n] = np.eye(n, dtype=np.uint8)
    return omega


def is_symplectic(mat: np.ndarray) -> bool:
    n = mat.shape[0] // 2
    omega = symplectic_form(n)
    lhs = (mat.astype(np.int64) @ omega.astype(np.int64) @ mat.T.astype(np.int64)) % 2
    return bool(np.array_equal(lhs, omega))


# ---------------------------------------------------------------------------
# Pauli ensemble
# ---------------------------------------------------------------------------

def sample_pauli_bases(n: int, rng: np.random.Generator) -> PauliBasisString:
    """One uniformly random length-n basis string over {X, Y, Z}."""
    idx = rng.integers(0, 3, size=n)
    return PauliBasisString("".join(BASIS_LETTERS[i] for i in idx))


def sample_pauli_bases_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, n) array of basis indices, 0=X 1=Y 2=Z."""
    return rng.integers(0, 3, size=(count, n), dtype=np.int8)


def pauli_rotation_dense(bases) -> np.ndarray:
    """Tensor product of the single-qubit basis rotations."""
    if isinstance(bases, PauliBasisString):
        bases = bases.bases
    out = np.array([[1.0]], dtype=complex)
    for c in bases:
        letter = BASIS_LETTERS[c] if isinstance(c, (int, np.integer)) else c
        out = np.kron(out, BASIS_ROTATIONS[letter])
    return out


# ---------------------------------------------------------------------------
# Symplectic-group sampling (vectorized Koenig-Smolin construction)
# ---------------------------------------------------------------------------
# Internally vectors over GF(2)^{2m} live in int64 scalars with the
# "pair" bit layout: bits (2i, 2i+1) hold qubit i's (x, z) components.

def _pair_inner(x, y):
    """Symplectic inner product in pair layout, elementwise over arrays."""
    xe = x & _EVEN_MASK
    xo = (x >> 1) & _EVEN_MASK
    ye = y & _EVEN_MASK
    yo = (y >> 1) & _EVEN_MASK
    return (np.bitwise_count(((xe & yo) ^ (xo & ye)).astype(np.uint64)) & 1).astype(np.int64)


def _transvect(h, rows):
    """Apply the transvection Z_h: v -> v + <v,h> h to each row; h is (B,)."""
    par = _pair_inner(rows, h[:, None])
    return rows ^ (h[:, None] * par)


def _find_transvection(x, y, m: int):
    """Vectorized pair (h1, h2) with Z_h2 Z_h1 x = y for nonzero x, y."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    b = x.shape[0]
    h1 = np.zeros(b, dtype=np.int64)
    h2 = np.zeros(b, dtype=np.int64)
    eq = x == y
    inner = _pair_inner(x, y)
    anti = (~eq) & (inner == 1)
    h1[anti] = (x ^ y)[anti]
    rem = ~(eq | anti)
    if not np.any(rem):
        return h1, h2
    shifts = 2 * np.arange(m, dtype=np.int64)
    px = (x[:, None] >> shifts) & 3
    py = (y[:, None] >> shifts) & 3
    both = (px != 0) & (py != 0)
    has_both = both.any(axis=1)
    rows = np.arange(b)

    # case: some pair where both are nonzero
    i1 = np.argmax(both, axis=1)
    a2 = px[rows, i1]
    b2 = py[rows, i1]
    z2 = a2 ^ b2
    z2 = np.where(z2 == 0, np.where((a2 == 1) | (a2 == 2), 3, 2), z2)
    zc = z2 << (2 * i1)
    sel = rem & has_both
    h1[sel] = (x ^ zc)[sel]
    h2[sel] = (y ^ zc)[sel]

    # case: disjoint supports; patch one x-only and one y-only pair
    sel = rem & ~has_both
    if np.any(sel):
        xonly = (px != 0) & (py == 0)
        yonly = (px == 0) & (py != 0)
        ixp = np.argmax(xonly, axis=1)
        iyp = np.argmax(yonly, axis=1)
        ax = px[rows, ixp]
        by = py[rows, iyp]
        zx = np.where(ax == 2, 1, 2) << (2 * ixp)
        zy = np.where(by == 2, 1, 2) << (2 * iyp)
        zd = zx | zy
        h1[sel] = (x ^ zd)[sel]
        h2[sel] = (y ^ zd)[sel]
    return h1, h2


def symplectic_rows_from_randomness(n: int, f1_levels, bits_levels) -> np.ndarray:
    """Deterministic core of the uniform symplectic sampler.

    ``f1_levels[k]`` and ``bits_levels[k]`` supply the randomness for
    recursion level of size ``m = n - k`` (top level first):
    ``f1`` uniform over [1, 4^m - 1], ``bits`` uniform over
    [0, 2^(2m-1) - 1].  Returns (batch, 2n) int64 rows in pair layout.
    """
    batch = np.asarray(f1_levels[0]).shape[0]
    rows = None
    for m in range(1, n + 1):
        f1 = np.asarray(f1_levels[n - m], dtype=np.int64)
        bits = np.asarray(bits_levels[n - m], dtype=np.int64)
        base = np.tile(np.array([1, 2], dtype=np.int64), (batch, 1))
        if rows is None:
            rows = base
        else:
            rows = np.concatenate([base, rows << 2], axis=1)
        e1 = np.ones(batch, dtype=np.int64)
        t1, t2 = _find_transvection(e1, f1, m)
        if m == 1:
            eprime = e1.copy()
        else:
            eprime = 1 | (((bits >> 1) & ((1 << (2 * m - 2)) - 1)) << 2)
        h0 = _transvect(t1, eprime[:, None])[:, 0]
        h0 = _transvect(t2, h0[:, None])[:, 0]
        f1_eff = np.where(bits & 1, 0, f1)
        for h in (t1, t2, h0, f1_eff):
            rows = _transvect(h, rows)
    return rows


def _rows_to_standard(rows: np.ndarray, n: int) -> np.ndarray:
    """Convert pair-layout rows to (batch, 2n, 2n) standard-layout bit matrices."""
    nn = 2 * n
    bitpos = np.arange(nn, dtype=np.int64)
    bits = ((rows[:, :, None] >> bitpos) & 1).astype(np.uint8)
    # pair row 2i -> standard row i (X_i image); 2i+1 -> row n+i (Z_i image)
    sel = np.empty(nn, dtype=np.int64)
    sel[:n] = 2 * np.arange(n)
    sel[n:] = 2 * np.arange(n) + 1
    return bits[:, sel][:, :, sel]


def sample_cliffords_batch(n: int, count: int, rng: np.random.Generator):
    """Uniform Clifford tableaus: (symplectic (count,2n,2n), phases (count,2n)).

    Randomness is drawn up-front in a fixed order (per level, top level
    first: f1 then bits; finally the 2n sign bits per sample), so the
    output depends only on (n, count, stream state), never on internal
    batching.
    """
    f1_levels = []
    bits_levels = []
    for m in range(n, 0, -1):
        f1_levels.append(rng.integers(1, 1 << (2 * m), size=count, dtype=np.int64))
        bits_levels.append(rng.integers(0, 1 << (2 * m - 1), size=count, dtype=np.int64))
    rows = symplectic_rows_from_randomness(n, f1_levels, bits_levels)
    symp = _rows_to_standard(rows, n)
    phases = rng.integers(0, 2, size=(count, 2 * n), dtype=np.uint8)
    return symp, phases


def sample_clifford(n: int, rng: np.random.Generator) -> CliffordTableau:
    """One uniformly random n-qubit Clifford (mod global phase)."""
    symp, phases = sample_cliffords_batch(n, 1, rng)
    return CliffordTableau(n, symp[0], phases[0])


# ---------------------------------------------------------------------------
# Tableau -> dense unitary
# ---------------------------------------------------------------------------

def _support_index(xs, zs, thetas) -> int:
    """Basis index in the support of the stabilizer state with generators
    ``i^theta X^x Z^z`` (mutually commuting, Hermitian)."""
    pivots = []
    diag = []
    for x, z, t in zip(xs, zs, thetas):
        for p, (px, pz, pt) in pivots:
            if (x >> p) & 1:
                t = (t + pt + 2 * ((z & px).bit_count() & 1)) % 4
                x ^= px
                z ^= pz
        if x == 0:
            diag.append((z, t))
        else:
            pivots.append((x.bit_length() - 1, (x, z, t)))
    k = 0
    solved = []
    for z, t in diag:
        rhs = (t >> 1) & 1
        for pb, pz, pr in solved:
            if (z >> pb) & 1:
                z ^= pz
                rhs ^= pr
        if z == 0:
            continue
        solved.append((z.bit_length() - 1, z, rhs))
    for pb, z, rhs in reversed(solved):
        if ((z & k).bit_count() & 1) != rhs:
            k |= 1 << pb
    return k


def clifford_column_form(symp: np.ndarray, phases: np.ndarray):
    """Closed-form column description of the unitaries for a tableau batch.

    U|0...0> is the stabilizer state ``phi0`` fixed by the Z-image
    strings, and the column for basis state b applies the product of the
    X-image strings selected by the bits of b.  That product is itself a
    signed Pauli string, so every column has the closed form

        U[i, b] = acol[b] * (-1)^{popcount(i & zcol[b]) mod 2} * phi0[i ^ xcol[b]]

    Returns ``(phi0, xcol, zcol, acol)``, each of shape (batch, 2^n)
    (``phi0`` and ``acol`` complex, ``xcol``/``zcol`` int64).  Global
    phase is fixed by making the support amplitude of U|0...0> real
    positive.  Rows and single columns of U are O(2^n) reads of these
    arrays, which is what the measurement simulation uses; the full
    dense matrix is only materialized on request.
    """
    batch, nn, _ = symp.shape
    n = nn // 2
    d = 1 << n
    w = bit_weights(n)
    sy = symp.astype(np.int64)
    ix = sy[:, :, :n] @ w          # (batch, 2n) bit-flip part per row
    iz = sy[:, :, n:] @ w
    xz = (sy[:, :, :n] * sy[:, :, n:]).sum(axis=2)
    base = (1j ** (xz % 4)) * (1.0 - 2.0 * phases.astype(np.float64))
    ell = np.arange(d, dtype=np.int64)

    ix_list = ix.tolist()
    iz_list = iz.tolist()
    th_list = ((xz + 2 * phases.astype(np.int64)) % 4).tolist()
    ks = np.array(
        [
            _support_index(ix_list[b][n:], iz_list[b][n:], th_list[b][n:])
            for b in range(batch)
        ],
        dtype=np.int64,
    )

    # |phi0> = Pi e_k with Pi the stabilizer projector of the Z images
    phi = np.zeros((batch, d), dtype=complex)
    phi[np.arange(batch), ks] = 1.0
    for j in range(n):
        row = n + j
        par = np.bitwise_count((ell[None, :] & iz[:, row][:, None]).astype(np.uint64)) & 1
        cvec = base[:, row][:, None] * (1.0 - 2.0 * par)
        idx = ell[None, :] ^ ix[:, row][:, None]
        cg = np.take_along_axis(cvec, idx, axis=1)
        phig = np.take_along_axis(phi, idx, axis=1)
        phi = 0.5 * (phi + cg * phig)
    nrm = np.sqrt(np.einsum("bi,bi->b", phi.conj(), phi).real)
    phi /= nrm[:, None]
    pk = phi[np.arange(batch), ks]
    phi *= (np.abs(pk) / pk)[:, None]

    # accumulated Pauli product per column: bit-flip part X, phase-flip
    # part Z, scalar prefactor A
    xcol = np.zeros((batch, d), dtype=np.int64)
    zcol = np.zeros((batch, d), dtype=np.int64)
    acol = np.zeros((batch, d), dtype=complex)
    acol[:, 0] = 1.0
    size = 1
    for j in range(n - 1, -1, -1):
        ixj = ix[:, j][:, None]
        izj = iz[:, j][:, None]
        selfpar = np.bitwise_count((ixj & izj).astype(np.uint64)) & 1
        crosspar = np.bitwise_count((ixj & zcol[:, :size]).astype(np.uint64)) & 1
        factor = base[:, j][:, None] * (1.0 - 2.0 * selfpar) * (1.0 - 2.0 * crosspar)
        xcol[:, size:2 * size] = xcol[:, :size] ^ ixj
        zcol[:, size:2 * size] = zcol[:, :size] ^ izj
        acol[:, size:2 * size] = acol[:, :size] * factor
        size *= 2
    return phi, xcol, zcol, acol


def clifford_columns(phi, xcol, zcol, acol, col_index: int) -> np.ndarray:
    """Column ``col_index`` of every unitary in the batch, shape (batch, 2^n)."""
    d = phi.shape[1]
    ell = np.arange(d, dtype=np.int64)
    gidx = ell[None, :] ^ xcol[:, col_index][:, None]
    spar = np.bitwise_count((ell[None, :] & zcol[:, col_index][:, None]).astype(np.uint64)) & 1
    return (acol[:, col_index][:, None] * (1.0 - 2.0 * spar)) * np.take_along_axis(phi, gidx, axis=1)


def clifford_rows(phi, xcol, zcol, acol, row_index: np.ndarray) -> np.ndarray:
    """Row ``row_index[b]`` of unitary b for the whole batch, shape (batch, 2^n)."""
    gidx = row_index[:, None] ^ xcol
    spar = np.bitwise_count((row_index[:, None] & zcol).astype(np.uint64)) & 1
    return (acol * (1.0 - 2.0 * spar)) * np.take_along_axis(phi, gidx, axis=1)


def clifford_dense_batch(symp: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Dense unitaries (batch, 2^n, 2^n) realizing the given tableaus."""
    phi, xcol, zcol, acol = clifford_column_form(symp, phases)
    batch, d = phi.shape
    ell = np.arange(d, dtype=np.int64)
    out = np.empty((batch, d, d), dtype=complex)
    for b in range(batch):
        gidx = ell[:, None] ^ xcol[b][None, :]
        spar = np.bitwise_count((ell[:, None] & zcol[b][None, :]).astype(np.uint64)) & 1
        out[b] = (acol[b][None, :] * (1.0 - 2.0 * spar)) * phi[b][gidx]
    return out


def basis_rotation_unitary(desc: UnitaryDescriptor) -> np.ndarray:
    """Dense rotation matrix realizing the sampled measurement setting."""
    if isinstance(desc, PauliBasisString):
        return pauli_rotation_dense(desc)
    if isinstance(desc, CliffordTableau):
        u = clifford_dense_batch(desc.symplectic[None], desc.phases[None])
        return u[0]
    raise TypeError(f"unsupported descriptor type {type(desc)!r}")


def dense_batch_limit(n: int) -> int:
    """Batch size keeping the (batch, 2^n, 2^n) workspace around 32 MB."""
    return max(8, min(2048, (1 << 21) // (1 << (2 * n))))


# ---------------------------------------------------------------------------
# Exhaustive enumeration (small n, used by exact channel checks)
# ---------------------------------------------------------------------------

def enumerate_clifford_group(n: int):
    """All Cliffords mod phase as tableaus; n <= 2 (24 and 11520 elements)."""
    if n not in (1, 2):
        raise ValueError("exhaustive enumeration supported for n in {1, 2} only")
    nn = 2 * n
    count = 1 << (nn * nn)
    idx = np.arange(count, dtype=np.int64)
    shifts = np.arange(nn * nn, dtype=np.int64)
    mats = ((idx[:, None] >> shifts) & 1).astype(np.uint8).reshape(count, nn, nn)
    omega = symplectic_form(n).astype(np.int64)
    lhs = (mats.astype(np.int64) @ omega @ mats.transpose(0, 2, 1).astype(np.int64)) % 2
    good = mats[np.all(lhs == omega, axis=(1, 2))]
    tabs = []
    for m in good:
        for p in range(1 << nn):
            ph = np.array([(p >> r) & 1 for r in range(nn)], dtype=np.uint8)
            tabs.append(CliffordTableau(n, m, ph))
    return tabs
