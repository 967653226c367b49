import numpy as np
import pytest

from shadowbench import ensembles as ens
from shadowbench import shadows as sh
from shadowbench.pauliops import PAULI_X, PAULI_Y, PAULI_Z
from shadowbench.seeding import derive_rng
from shadowbench.states import (
    HermitianOperator,
    PureState,
    basis_state,
    density,
    identity_operator,
    make_ghz,
    random_pure_state,
)


def _plus():
    return PureState(1, np.array([1.0, 1.0]) / np.sqrt(2))


def test_simulate_shot_deterministic_z_on_zero():
    rng = derive_rng(1, 0)
    for _ in range(10):
        rec = sh.simulate_shot(basis_state(1), ens.PauliBasisString("Z"), rng)
        assert rec.outcome == "0"


def test_simulate_shot_x_basis_on_zero_is_fair():
    rng = derive_rng(1, 1)
    outs = [sh.simulate_shot(basis_state(1), ens.PauliBasisString("X"), rng).outcome
            for _ in range(10000)]
    frac = outs.count("0") / len(outs)
    assert abs(frac - 0.5) < 0.015


def test_simulate_shot_ghz_correlations():
    rng = derive_rng(1, 2)
    outs = [sh.simulate_shot(make_ghz(2), ens.PauliBasisString("ZZ"), rng).outcome
            for _ in range(2000)]
    assert set(outs) == {"00", "11"}
    assert abs(outs.count("00") / 2000 - 0.5) < 0.04


def test_simulate_shot_accepts_density_matrix():
    rng = derive_rng(1, 3)
    rho = HermitianOperator(1, np.eye(2) / 2)
    outs = [sh.simulate_shot(rho, ens.PauliBasisString("Z"), rng).outcome
            for _ in range(2000)]
    assert abs(outs.count("0") / 2000 - 0.5) < 0.04


def test_invert_pauli_single_qubit():
    rec = sh.MeasurementRecord("pauli", ens.PauliBasisString("Z"), "0")
    assert np.allclose(sh.invert_pauli(rec).entries, np.diag([2.0, -1.0]))


def test_snapshot_traces_are_one():
    rng = derive_rng(1, 4)
    bank_p = sh.generate_bank(make_ghz(2), "pauli", 50, rng)
    for rec in bank_p:
        snap = sh.invert_pauli(rec)
        assert abs(np.trace(snap.entries).real - 1.0) < 1e-12
    bank_c = sh.generate_bank(make_ghz(2), "clifford", 50, derive_rng(1, 5))
    for rec in bank_c:
        snap = sh.invert_clifford(rec)
        assert abs(np.trace(snap.entries).real - 1.0) < 1e-10


def test_invert_clifford_coefficient():
    # identity tableau: U = I, so the snapshot is (2^N+1)|b><b| - I
    n = 3
    symp = np.eye(2 * n, dtype=np.uint8)
    tab = ens.CliffordTableau(n, symp, np.zeros(2 * n, dtype=np.uint8))
    rec = sh.MeasurementRecord("clifford", tab, "010")
    snap = sh.invert_clifford(rec).entries
    expect = -np.eye(8)
    expect[2, 2] += 9.0
    assert np.allclose(snap, expect, atol=1e-12)


def test_invert_wrong_ensemble_rejected():
    rec = sh.MeasurementRecord("pauli", ens.PauliBasisString("Z"), "0")
    with pytest.raises(ValueError):
        sh.invert_clifford(rec)
    tab = ens.CliffordTableau(1, np.eye(2, dtype=np.uint8), np.zeros(2, dtype=np.uint8))
    crec = sh.MeasurementRecord("clifford", tab, "0")
    with pytest.raises(ValueError):
        sh.invert_pauli(crec)


def test_pauli_mean_recovers_x_expectation():
    rng = derive_rng(2, 0)
    bank = sh.generate_bank(_plus(), "pauli", 100000, rng)
    x = HermitianOperator(1, PAULI_X)
    est = sh.estimate_expectation(x, bank)
    # single-shot sigma <= sqrt(3) for a weight-1 Pauli
    assert abs(est - 1.0) < 3 * np.sqrt(3.0 / len(bank))


def test_clifford_ghz_fidelity():
    rng = derive_rng(2, 1)
    ghz = make_ghz(3)
    bank = sh.generate_bank(ghz, "clifford", 5000, rng)
    est = sh.estimate_expectation(density(ghz), bank)
    assert abs(est - 1.0) < 0.1


def test_identity_observable_is_exact():
    rng = derive_rng(2, 2)
    for e in ("pauli", "clifford"):
        bank = sh.generate_bank(make_ghz(2), e, 200, rng)
        vals = sh.shot_values(bank, [identity_operator(2)])
        assert np.max(np.abs(vals - 1.0)) < 1e-10


def test_exact_unbiasedness_small_registers():
    rng = derive_rng(2, 3)
    for n in (1, 2):
        psi = random_pure_state(n, rng)
        rho = density(psi).entries
        for e in ("pauli", "clifford"):
            avg = sh.exact_average_snapshot(rho, e, n)
            assert np.max(np.abs(avg - rho)) < 1e-10


def test_pauli_channel_diagonal_action():
    for p in (PAULI_X, PAULI_Y, PAULI_Z):
        out = sh.exact_forward_channel(p, "pauli", 1)
        assert np.max(np.abs(out - p / 3.0)) < 1e-12
    out = sh.exact_forward_channel(np.eye(2, dtype=complex), "pauli", 1)
    assert np.max(np.abs(out - np.eye(2))) < 1e-12


def test_clifford_channel_enumerated_n2():
    rng = derive_rng(2, 4)
    psi = random_pure_state(2, rng)
    rho = density(psi).entries
    chan = sh.exact_forward_channel(rho, "clifford", 2)
    assert np.max(np.abs(chan - (rho + np.eye(4)) / 5.0)) < 1e-10
    avg = sh.exact_average_snapshot(rho, "clifford", 2)
    assert np.max(np.abs(avg - rho)) < 1e-10


def test_constant_shift_identity_per_shot():
    rng = derive_rng(2, 5)
    obs = density(make_ghz(2))
    alpha = 0.37
    shifted = HermitianOperator(2, alpha * np.eye(4) + obs.entries)
    for e in ("pauli", "clifford"):
        bank = sh.generate_bank(make_ghz(2), e, 300, rng)
        vals = sh.shot_values(bank, [obs, shifted])
        assert np.max(np.abs(vals[:, 1] - (alpha + vals[:, 0]))) < 1e-10


def test_block_values_match_full_observable():
    from shadowbench.witness import embed_witness
    rng = derive_rng(2, 6)
    spec = embed_witness(2, 4, 0.3)
    state = make_ghz(4)
    for e in ("pauli", "clifford"):
        bank = sh.generate_bank(state, e, 400, rng)
        via_block = spec.alpha - sh.block_shot_values(bank, spec.block_projector)
        via_full = sh.shot_values(bank, [spec.embedded_operator])[:, 0]
        assert np.max(np.abs(via_block - via_full)) < 1e-9


def test_estimator_errors():
    rng = derive_rng(2, 7)
    bank = sh.generate_bank(make_ghz(2), "pauli", 10, rng)
    with pytest.raises(ValueError):
        sh.SnapshotBank([])
    with pytest.raises(ValueError):
        sh.estimate_expectation(identity_operator(2), bank,
                                estimator="median-of-means", batches=11)
    with pytest.raises(ValueError):
        sh.estimate_expectation(identity_operator(2), bank, estimator="nonsense")
    with pytest.raises(ValueError):
        sh.estimate_expectation(identity_operator(3), bank)


def test_median_of_means_path():
    rng = derive_rng(2, 8)
    bank = sh.generate_bank(_plus(), "pauli", 9000, rng)
    x = HermitianOperator(1, PAULI_X)
    est = sh.estimate_expectation(x, bank, estimator="median-of-means", batches=9)
    assert abs(est - 1.0) < 0.2


def test_reconstruct_single_snapshot():
    rec = sh.MeasurementRecord("pauli", ens.PauliBasisString("Z"), "0")
    bank = sh.SnapshotBank([rec])
    out = sh.reconstruct_density(bank)
    assert np.allclose(out.entries, np.diag([2.0, -1.0]))


def test_reconstruct_is_unbiased_via_enumeration():
    rng = derive_rng(2, 9)
    psi = random_pure_state(1, rng)
    rho = density(psi).entries
    for e in ("pauli", "clifford"):
        avg = sh.exact_average_snapshot(rho, e, 1)
        assert np.max(np.abs(avg - rho)) < 1e-12


def test_ghz_reconstruction_quality():
    rng = derive_rng(2, 10)
    ghz = make_ghz(3)
    bank = sh.generate_bank(ghz, "clifford", 5000, rng)
    rec = sh.reconstruct_density(bank).entries
    assert abs(np.trace(rec).real - 1.0) < 1e-10
    for i, j in [(0, 0), (0, 7), (7, 0), (7, 7)]:
        assert abs(rec[i, j].real - 0.5) < 0.05


def test_bank_generation_deterministic():
    ghz = make_ghz(3)
    b1 = sh.generate_bank(ghz, "clifford", 60, derive_rng(4, 0))
    b2 = sh.generate_bank(ghz, "clifford", 60, derive_rng(4, 0))
    assert all(r1.outcome == r2.outcome and r1.descriptor.key() == r2.descriptor.key()
               for r1, r2 in zip(b1, b2))


def test_stream_batch_size_does_not_change_outcomes():
    ghz = make_ghz(3)
    outs = {}
    for batch in (7, 64, 1000):
        rng = derive_rng(4, 1)
        got = []
        for lo, hi, _, outcomes, _ in sh.stream_measurements(ghz, "clifford", 100, rng, batch=batch):
            got.extend(outcomes.tolist())
        outs[batch] = got
    assert outs[7] == outs[64] == outs[1000]


def test_serialization_roundtrip(tmp_path):
    for e in ("pauli", "clifford"):
        bank = sh.generate_bank(make_ghz(3), e, 80, derive_rng(4, 2), label="test bank",
                                master_seed=99)
        path = tmp_path / f"{e}.bank"
        bank.save(path)
        loaded = sh.SnapshotBank.load(path)
        assert len(loaded) == len(bank)
        assert loaded.source_state_label == "test bank"
        assert loaded.master_seed == 99
        for r1, r2 in zip(bank, loaded):
            assert r1.outcome == r2.outcome
            assert r1.ensemble == r2.ensemble
        obs = density(make_ghz(3))
        v1 = sh.shot_values(bank, [obs])
        v2 = sh.shot_values(loaded, [obs])
        assert np.array_equal(v1, v2)
        loaded.save(path.with_suffix(".resave"))
        assert path.read_bytes() == path.with_suffix(".resave").read_bytes()


def test_load_rejects_foreign_files(tmp_path):
    p = tmp_path / "bad.bank"
    p.write_text("not a bank\n")
    with pytest.raises(ValueError):
        sh.SnapshotBank.load(p)


def test_mixed_ensemble_bank_rejected():
    rec_p = sh.MeasurementRecord("pauli", ens.PauliBasisString("Z"), "0")
    tab = ens.CliffordTableau(1, np.eye(2, dtype=np.uint8), np.zeros(2, dtype=np.uint8))
    rec_c = sh.MeasurementRecord("clifford", tab, "0")
    with pytest.raises(ValueError):
        sh.SnapshotBank([rec_p, rec_c])
