"""Construction of the embedded, perturbed GHZ witness family.

The witness for a genuinely multipartite-entangled pure target |psi> is
``alpha * I - |psi><psi|`` with ``alpha`` the maximal squared overlap of
|psi> with the biseparable set.  For a pure state that maximum equals
the largest squared Schmidt coefficient over all nontrivial
bipartitions (the biseparable optimum is attained on a product-across-
one-cut state, and the optimal overlap across a fixed cut is exactly
the top singular value of the reshaped amplitude matrix).  A
random-restart alternating-ascent maximizer over explicit biseparable
states is provided as an independent cross-check of that identity.

Targets are perturbations of the GHZ state towards a separable anchor,
and the witness block is embedded into the larger register by padding
with the identity, which keeps the fluctuating part of the observable
supported on the block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import (
    Bipartition,
    HermitianOperator,
    PureState,
    density,
    expectation_value,
    make_ghz,
    nontrivial_bipartitions,
    schmidt_max,
    tensor,
    identity_operator,
)

EMBED_ATOL = 1e-12


@dataclass(frozen=True)
class WitnessSpec:
    """Fully-specified embedded witness alpha*I - rho_pert(theta) (x) I."""

    total_qubits: int
    block_size: int
    theta: float
    alpha: float
    anchor: PureState
    block_state: PureState
    embedded_operator: HermitianOperator

    def __post_init__(self):
        if not self.alpha < 1.0:
            raise ValueError("witness scale alpha must be below 1")
        n, N = self.block_size, self.total_qubits
        proj = density(self.block_state)
        expect = self.alpha * np.eye(1 << N) - np.kron(
            proj.entries, np.eye(1 << (N - n)))
        if np.max(np.abs(self.embedded_operator.entries - expect)) > EMBED_ATOL:
            raise ValueError("embedded operator deviates from its defining form")

    @property
    def block_projector(self) -> np.ndarray:
        """The fluctuating part of the witness: |psi_pert><psi_pert| on the block."""
        return density(self.block_state).entries

    def describe(self) -> str:
        """Structured one-line record for experiment manifests."""
        return (f"witness N={self.total_qubits} n={self.block_size} "
                f"theta={self.theta!r} alpha={self.alpha!r} anchor=|{'0' * self.block_size}>")


def ghz_witness(n: int) -> HermitianOperator:
    """(1/2) I - |GHZ_n><GHZ_n|; detects genuine n-partite entanglement near GHZ."""
    if n < 2:
        raise ValueError("a multipartite witness needs at least 2 qubits")
    ghz = make_ghz(n)
    return HermitianOperator(n, 0.5 * np.eye(1 << n) - density(ghz).entries)


def find_separable_anchor(n: int) -> PureState:
    """Product state with vanishing unperturbed witness value: |0...0>.

    |<0...0|GHZ_n>|^2 = 1/2 = alpha, so Tr(|phi><phi| W_n(0)) = 0 exactly.
    """
    if n < 2:
        raise ValueError("anchor defined for n >= 2")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return PureState(n, amps)


def perturbed_target(n: int, theta: float) -> PureState:
    """Normalized cos(theta)|GHZ_n> + sin(theta)|anchor>.

    With the |0...0> anchor the squared norm before normalization is
    1 + sin(2 theta)/sqrt(2).
    """
    if not 0.0 <= theta < np.pi / 2:
        raise ValueError(f"theta {theta} outside [0, pi/2)")
    ghz = make_ghz(n)
    anchor = find_separable_anchor(n)
    raw = np.cos(theta) * ghz.amplitudes + np.sin(theta) * anchor.amplitudes
    return PureState(n, raw / np.linalg.norm(raw))


def alpha_of_theta(psi_pert: PureState) -> float:
    """Maximal squared overlap of the target with the biseparable set.

    Computed exactly as the maximum over all nontrivial bipartitions of
    the largest squared Schmidt coefficient.
    """
    n = psi_pert.num_qubits
    if n < 2:
        raise ValueError("biseparable overlap needs at least 2 qubits")
    return max(schmidt_max(psi_pert, cut) for cut in nontrivial_bipartitions(n))


def embed_witness(n: int, total_qubits: int, theta: float) -> WitnessSpec:
    """alpha(theta) I_{2^N} - rho_pert(theta) (x) I, block on qubits 0..n-1."""
    if not 2 <= n <= total_qubits:
        raise ValueError(f"block size {n} must satisfy 2 <= n <= {total_qubits}")
    psi = perturbed_target(n, theta)
    alpha = alpha_of_theta(psi)
    proj = density(psi)
    if n < total_qubits:
        padded = tensor(proj, identity_operator(total_qubits - n))
    else:
        padded = proj
    op = HermitianOperator(total_qubits, alpha * np.eye(1 << total_qubits) - padded.entries)
    return WitnessSpec(total_qubits, n, float(theta), float(alpha),
                       find_separable_anchor(n), psi, op)


def true_witness_value(spec: WitnessSpec, rho) -> float:
    """Exact Tr(W rho); the ground truth for estimation-error curves."""
    if rho.num_qubits != spec.total_qubits:
        raise ValueError("state size does not match witness")
    return expectation_value(spec.embedded_operator, rho)


def biseparable_overlap_ascent(psi: PureState, restarts: int, iterations: int,
                               rng: np.random.Generator) -> float:
    """Independent maximizer of |<phi|psi>|^2 over biseparable |phi>.

    For every nontrivial cut, alternately optimizes the two tensor
    factors of |phi> = |a>_A |b>_B (each step contracts psi against the
    frozen factor and renormalizes, which is the exact coordinate
    maximum) from random product-state starts.  Deliberately avoids the
    SVD used by the production path.
    """
    n = psi.num_qubits
    best = 0.0
    for cut in nontrivial_bipartitions(n):
        a, b = cut.subsystem_a, cut.subsystem_b
        mat = psi.amplitudes.reshape((2,) * n).transpose(list(a) + list(b)).reshape(
            1 << len(a), 1 << len(b))
        for _ in range(restarts):
            va = rng.standard_normal(mat.shape[0]) + 1j * rng.standard_normal(mat.shape[0])
            va /= np.linalg.norm(va)
            for _ in range(iterations):
                vb = mat.T @ va.conj()
                nb = np.linalg.norm(vb)
                if nb == 0.0:
                    break
                vb /= nb
                va = mat @ vb.conj()
                na = np.linalg.norm(va)
                va /= na
            overlap = abs(np.vdot(va, mat @ vb.conj())) ** 2
            best = max(best, float(overlap))
    return best
