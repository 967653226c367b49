import numpy as np
import pytest
from scipy import stats as sps

from shadowbench import ensembles as ens
from shadowbench.pauliops import HADAMARD, PAULI_X, PAULI_Z, identify_pauli
from shadowbench.seeding import derive_rng

from oracles import symplectic_rows_scalar, tableau_roundtrip_ok


def test_pauli_basis_uniform_n1():
    rng = derive_rng(42, 0)
    draws = ens.sample_pauli_bases_batch(1, 30000, rng)[:, 0]
    counts = np.bincount(draws, minlength=3)
    _, p = sps.chisquare(counts)
    assert p > 0.001
    assert np.all(np.abs(counts / 30000 - 1 / 3) < 0.01)


def test_pauli_basis_alphabet_n2():
    rng = derive_rng(42, 1)
    for _ in range(50):
        s = ens.sample_pauli_bases(2, rng)
        assert len(s.bases) == 2
        assert set(s.bases) <= set("XYZ")


def test_pauli_sampling_deterministic():
    a = [ens.sample_pauli_bases(3, derive_rng(42, 7)).bases for _ in range(1)]
    b = [ens.sample_pauli_bases(3, derive_rng(42, 7)).bases for _ in range(1)]
    assert a == b
    seq1 = ens.sample_pauli_bases_batch(4, 100, derive_rng(42, 8))
    seq2 = ens.sample_pauli_bases_batch(4, 100, derive_rng(42, 8))
    assert np.array_equal(seq1, seq2)


def test_basis_rotation_all_z_is_identity():
    u = ens.basis_rotation_unitary(ens.PauliBasisString("ZZZ"))
    assert np.allclose(u, np.eye(8))


def test_x_rotation_is_hadamard():
    u = ens.basis_rotation_unitary(ens.PauliBasisString("X"))
    assert np.allclose(u, HADAMARD)
    assert np.allclose(u @ PAULI_Z @ u.conj().T, PAULI_X)


def test_y_rotation_maps_eigenbasis():
    u = ens.BASIS_ROTATIONS["Y"]
    plus_i = np.array([1.0, 1j]) / np.sqrt(2)
    mapped = u @ plus_i
    assert abs(abs(mapped[0]) - 1.0) < 1e-12


def test_pauli_rotation_factorizes():
    got = ens.basis_rotation_unitary(ens.PauliBasisString("XZY"))
    expect = np.kron(np.kron(ens.BASIS_ROTATIONS["X"], ens.BASIS_ROTATIONS["Z"]),
                     ens.BASIS_ROTATIONS["Y"])
    assert np.allclose(got, expect, atol=1e-12)
    assert np.max(np.abs(got.conj().T @ got - np.eye(8))) < 1e-10


def test_symplectic_sampler_matches_scalar_reference():
    rng = derive_rng(123, 0)
    for n in (1, 2, 3, 5, 7):
        count = 25
        f1s, bits = [], []
        for m in range(n, 0, -1):
            f1s.append(rng.integers(1, 1 << (2 * m), size=count, dtype=np.int64))
            bits.append(rng.integers(0, 1 << (2 * m - 1), size=count, dtype=np.int64))
        rows = ens.symplectic_rows_from_randomness(n, f1s, bits)
        for b in range(count):
            assert list(rows[b]) == symplectic_rows_scalar(n, f1s, bits, b)


def test_sampled_tableaus_are_symplectic():
    rng = derive_rng(5, 0)
    for n in (1, 2, 4, 6):
        symp, _ = ens.sample_cliffords_batch(n, 40, rng)
        for b in range(40):
            assert ens.is_symplectic(symp[b])


def test_tableau_validation_rejects_non_symplectic():
    bad = np.zeros((2, 2), dtype=np.uint8)
    with pytest.raises(ValueError):
        ens.CliffordTableau(1, bad, np.zeros(2, dtype=np.uint8))


def test_clifford_uniform_over_c1():
    rng = derive_rng(7, 0)
    symp, ph = ens.sample_cliffords_batch(1, 50000, rng)
    keys = {}
    for b in range(50000):
        k = symp[b].tobytes() + ph[b].tobytes()
        keys[k] = keys.get(k, 0) + 1
    assert len(keys) == 24
    _, p = sps.chisquare(list(keys.values()))
    assert p > 0.001


def test_dense_unitarity_and_roundtrip():
    rng = derive_rng(9, 0)
    for n in (1, 2, 3):
        symp, ph = ens.sample_cliffords_batch(n, 30, rng)
        u = ens.clifford_dense_batch(symp, ph)
        d = 1 << n
        for b in range(30):
            assert np.max(np.abs(u[b].conj().T @ u[b] - np.eye(d))) < 1e-10
            assert tableau_roundtrip_ok(symp[b], ph[b], u[b], n)


def test_clifford_conjugation_gives_signed_paulis():
    rng = derive_rng(9, 1)
    tab = ens.sample_clifford(3, rng)
    u = ens.basis_rotation_unitary(tab)
    for j in range(3):
        for p in (PAULI_X, PAULI_Z):
            site = [np.eye(2)] * 3
            site[j] = p
            mat = np.array([[1.0]], dtype=complex)
            for s in site:
                mat = np.kron(mat, s)
            identify_pauli(u @ mat @ u.conj().T)  # raises if not a signed Pauli


def test_single_sample_matches_batch_convention():
    tab = ens.sample_clifford(2, derive_rng(11, 0))
    tab2 = ens.sample_clifford(2, derive_rng(11, 0))
    assert tab.key() == tab2.key()
    u1 = ens.basis_rotation_unitary(tab)
    u2 = ens.clifford_dense_batch(tab.symplectic[None], tab.phases[None])[0]
    assert np.allclose(u1, u2)


def test_rows_and_columns_match_dense():
    rng = derive_rng(9, 2)
    symp, ph = ens.sample_cliffords_batch(3, 20, rng)
    u = ens.clifford_dense_batch(symp, ph)
    phi, xc, zc, ac = ens.clifford_column_form(symp, ph)
    ridx = derive_rng(9, 3).integers(0, 8, size=20)
    rows = ens.clifford_rows(phi, xc, zc, ac, ridx)
    col0 = ens.clifford_columns(phi, xc, zc, ac, 5)
    for b in range(20):
        assert np.allclose(rows[b], u[b][ridx[b], :], atol=1e-12)
        assert np.allclose(col0[b], u[b][:, 5], atol=1e-12)


def test_two_design_second_moment_n2():
    rng = derive_rng(13, 0)
    psi = (derive_rng(13, 1).standard_normal(4)
           + 1j * derive_rng(13, 1).standard_normal(4))
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    count = 50000
    symp, ph = ens.sample_cliffords_batch(2, count, rng)
    u = ens.clifford_dense_batch(symp, ph)
    rot = np.matmul(u, rho)
    probs = np.einsum("bij,bij->bi", rot, u.conj()).real
    chan = np.einsum("si,sia,sib->ab", probs, u.conj(), u) / count
    assert np.max(np.abs(chan - (rho + np.eye(4)) / 5.0)) < 5e-3


def test_enumerations():
    assert len(ens.enumerate_clifford_group(1)) == 24
    assert len(ens.enumerate_clifford_group(2)) == 11520
    with pytest.raises(ValueError):
        ens.enumerate_clifford_group(3)


def test_basis_string_validation():
    with pytest.raises(ValueError):
        ens.PauliBasisString("XQZ")
    with pytest.raises(ValueError):
        ens.PauliBasisString("")
