"""Dense state and operator algebra for small qubit registers.

Everything here is dense ``numpy`` linear algebra; at the target sizes
(up to 8-10 qubits) a ``2**N x 2**N`` complex matrix is small, so
correctness and clarity win over cleverness.  All values are immutable
after construction and safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 10

NORM_ATOL = 1e-12
HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PureState:
    """Unit-norm amplitude vector on ``num_qubits`` qubits (qubit 0 = MSB)."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        object.__setattr__(self, "amplitudes", amps)
        if self.num_qubits < 1:
            raise ValueError("need at least one qubit")
        if amps.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"amplitude vector has length {amps.shape}, expected {1 << self.num_qubits}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_ATOL}")

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian matrix on ``num_qubits`` qubits."""

    num_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen(self.entries)
        object.__setattr__(self, "entries", entries)
        d = 1 << self.num_qubits
        if entries.shape != (d, d):
            raise ValueError(f"matrix shape {entries.shape}, expected {(d, d)}")
        if np.max(np.abs(entries - entries.conj().T)) > HERMITIAN_ATOL:
            raise ValueError("matrix is not Hermitian within tolerance")

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits


@dataclass(frozen=True)
class Bipartition:
    """A cut of the register into two non-empty, disjoint index sets."""

    subsystem_a: tuple
    subsystem_b: tuple

    def __post_init__(self):
        a, b = tuple(self.subsystem_a), tuple(self.subsystem_b)
        object.__setattr__(self, "subsystem_a", a)
        object.__setattr__(self, "subsystem_b", b)
        if not a or not b:
            raise ValueError("both sides of a bipartition must be non-empty")
        n = len(a) + len(b)
        if sorted(a + b) != list(range(n)):
            raise ValueError(f"index sets {a} | {b} do not partition 0..{n - 1}")

    @classmethod
    def from_keep(cls, keep, num_qubits: int) -> "Bipartition":
        keep = tuple(sorted(int(q) for q in keep))
        rest = tuple(q for q in range(num_qubits) if q not in keep)
        return cls(keep, rest)

    @property
    def num_qubits(self) -> int:
        return len(self.subsystem_a) + len(self.subsystem_b)


def make_ghz(n: int, max_qubits: int = MAX_QUBITS) -> PureState:
    """The n-qubit GHZ state (|0...0> + |1...1>)/sqrt(2); |+> at n=1."""
    if not 1 <= n <= max_qubits:
        raise ValueError(f"qubit count {n} outside supported range 1..{max_qubits}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return PureState(n, amps)


def make_theta_family(n: int, theta: float, max_qubits: int = MAX_QUBITS) -> PureState:
    """cos(theta)|0...0> + sin(theta)|1...1>, theta in [0, pi/4]."""
    if not 1 <= n <= max_qubits:
        raise ValueError(f"qubit count {n} outside supported range 1..{max_qubits}")
    if not 0.0 <= theta <= np.pi / 4 + 1e-12:
        raise ValueError(f"theta {theta} outside [0, pi/4]")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = np.cos(theta)
    amps[-1] = np.sin(theta)
    return PureState(n, amps)


def tensor(a: HermitianOperator, b: HermitianOperator,
           max_qubits: int = MAX_QUBITS) -> HermitianOperator:
    """Kronecker product with ``a`` on the lower-index (most significant) qubits."""
    n = a.num_qubits + b.num_qubits
    if n > max_qubits:
        raise ValueError(f"combined qubit count {n} exceeds supported {max_qubits}")
    return HermitianOperator(n, np.kron(a.entries, b.entries))


def tensor_pure(a: PureState, b: PureState, max_qubits: int = MAX_QUBITS) -> PureState:
    """Product state with ``a`` on the lower-index qubits."""
    n = a.num_qubits + b.num_qubits
    if n > max_qubits:
        raise ValueError(f"combined qubit count {n} exceeds supported {max_qubits}")
    return PureState(n, np.kron(a.amplitudes, b.amplitudes))


def identity_operator(n: int) -> HermitianOperator:
    return HermitianOperator(n, np.eye(1 << n, dtype=complex))


def density(psi: PureState) -> HermitianOperator:
    """Rank-1 density matrix |psi><psi|."""
    return HermitianOperator(psi.num_qubits, np.outer(psi.amplitudes, psi.amplitudes.conj()))


def expectation_value(op: HermitianOperator, state) -> float:
    """Tr(op rho) for a density matrix or <psi|op|psi> for a pure state."""
    if isinstance(state, PureState):
        val = np.vdot(state.amplitudes, op.entries @ state.amplitudes)
    else:
        val = np.trace(op.entries @ state.entries)
    if abs(val.imag) > 1e-8:
        raise ValueError(f"expectation value has imaginary residue {val.imag}")
    return float(val.real)


def partial_trace(rho: HermitianOperator, keep: Bipartition) -> HermitianOperator:
    """Reduced density matrix on ``keep.subsystem_a`` (ascending qubit order)."""
    n = rho.num_qubits
    if keep.num_qubits != n:
        raise ValueError("bipartition size does not match operator")
    tr = float(np.trace(rho.entries).real)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"input trace {tr} deviates from 1")
    a = keep.subsystem_a
    b = keep.subsystem_b
    tensor_form = rho.entries.reshape((2,) * (2 * n))
    # row indices 0..n-1, column indices n..2n-1; contract the traced pairs
    perm = list(a) + list(b) + [n + q for q in a] + [n + q for q in b]
    t = tensor_form.transpose(perm)
    da, db = 1 << len(a), 1 << len(b)
    t = t.reshape(da, db, da, db)
    out = np.einsum("ibjb->ij", t)
    return HermitianOperator(len(a), out)


def schmidt_coefficients(psi: PureState, cut: Bipartition) -> np.ndarray:
    """Singular values of the amplitude matrix reshaped along the cut, descending."""
    n = psi.num_qubits
    if cut.num_qubits != n:
        raise ValueError("bipartition size does not match state")
    a, b = cut.subsystem_a, cut.subsystem_b
    t = psi.amplitudes.reshape((2,) * n).transpose(list(a) + list(b))
    mat = t.reshape(1 << len(a), 1 << len(b))
    return np.linalg.svd(mat, compute_uv=False)


def schmidt_max(psi: PureState, cut: Bipartition) -> float:
    """Largest squared Schmidt coefficient across the cut (1 iff product)."""
    s = schmidt_coefficients(psi, cut)
    return float(s[0] ** 2)


def entanglement_entropy(psi: PureState, cut: Bipartition) -> float:
    """Von Neumann entropy of the reduced state across the cut, in bits."""
    p = schmidt_coefficients(psi, cut) ** 2
    p = p[p > 1e-15]
    return float(-np.sum(p * np.log2(p))) + 0.0


def nontrivial_bipartitions(n: int):
    """All inequivalent cuts of n qubits (subsystem containing qubit 0)."""
    cuts = []
    for mask in range(1, 1 << (n - 1)):
        keep = [0] + [q for q in range(1, n) if (mask >> (q - 1)) & 1]
        if len(keep) < n:
            cuts.append(Bipartition.from_keep(keep, n))
    # mask 0 corresponds to keep = {0}
    cuts.insert(0, Bipartition.from_keep([0], n))
    return cuts


def basis_state(n: int, index: int = 0) -> PureState:
    """Computational basis state |index> on n qubits."""
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1.0
    return PureState(n, amps)


def random_pure_state(n: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state."""
    z = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return PureState(n, z / np.linalg.norm(z))


def random_product_state(n: int, rng: np.random.Generator) -> PureState:
    """Tensor product of independent Haar-random single-qubit states."""
    amps = np.array([1.0], dtype=complex)
    for _ in range(n):
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        amps = np.kron(amps, z / np.linalg.norm(z))
    return PureState(n, amps)
