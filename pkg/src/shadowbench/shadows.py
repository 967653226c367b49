"""Measurement simulation, classical records, inverse channels, estimators.

A shot applies a sampled rotation U to the state, measures in the
computational basis (Born rule via inverse-CDF sampling over the 2^N
outcome probabilities) and stores the classical record (U, b).  Records
are cheap (O(N) bytes for Pauli, O(N^2) bits for Clifford tableaus) and
are materialized into dense snapshot matrices only on demand:

* Pauli:    rho_hat = tensor_j (3 u_j^dag |b_j><b_j| u_j - I)
* Clifford: rho_hat = (2^N + 1) U^dag |b><b| U - I

Both have unit trace exactly and average to the measured state (the
inverse-channel estimator is unbiased); a single snapshot, and even the
bank average, need not be a physical density matrix and no projection
onto the PSD cone is applied.

Bank files are line-delimited (see ``SnapshotBank.save`` for the exact
byte format) so the same snapshots can be re-used to estimate different
observables across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import ensembles as ens
from .ensembles import CliffordTableau, PauliBasisString, UnitaryDescriptor
from .states import HermitianOperator, PureState

PAULI_ENSEMBLE = "pauli"
CLIFFORD_ENSEMBLE = "clifford"
ENSEMBLES = (PAULI_ENSEMBLE, CLIFFORD_ENSEMBLE)

IMAG_RESIDUE_ATOL = 1e-8
_NEGATIVE_PROB_ATOL = 1e-10

# 3 u^dag |b><b| u - I for each (basis, outcome); the per-qubit inverse
# channel factor of the Pauli ensemble
_SNAPSHOT_FACTORS = np.empty((3, 2, 2, 2), dtype=complex)
for _i, _c in enumerate(ens.BASIS_LETTERS):
    _u = ens.BASIS_ROTATIONS[_c]
    for _b in (0, 1):
        _proj = np.outer(_u.conj().T[:, _b], _u[_b, :])
        _SNAPSHOT_FACTORS[_i, _b] = 3.0 * _proj - np.eye(2)


@dataclass(frozen=True)
class MeasurementRecord:
    """One stored shot: ensemble tag, sampled rotation, outcome bitstring."""

    ensemble: str
    descriptor: UnitaryDescriptor
    outcome: str

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"unknown ensemble {self.ensemble!r}")
        expect = PauliBasisString if self.ensemble == PAULI_ENSEMBLE else CliffordTableau
        if not isinstance(self.descriptor, expect):
            raise ValueError(f"{self.ensemble} record needs a {expect.__name__} descriptor")
        if len(self.outcome) != self.num_qubits or any(c not in "01" for c in self.outcome):
            raise ValueError(f"outcome {self.outcome!r} does not match descriptor size")

    @property
    def num_qubits(self) -> int:
        return self.descriptor.num_qubits

    @property
    def outcome_index(self) -> int:
        return int(self.outcome, 2)


class SnapshotBank:
    """Frozen, single-ensemble collection of measurement records.

    Columnar copies of the record data (basis indices / tableau bits /
    outcome indices) are kept alongside the record objects so that bulk
    estimation runs vectorized; for Clifford banks the rotated rows
    U^dag|b> may be cached at generation time and are rebuilt on demand
    otherwise.
    """

    def __init__(self, records, source_state_label: str = "", master_seed: int = 0,
                 _arrays=None):
        records = list(records)
        if not records:
            raise ValueError("bank needs at least one record")
        first = records[0]
        for r in records:
            if r.ensemble != first.ensemble or r.num_qubits != first.num_qubits:
                raise ValueError("all records in a bank must share ensemble and qubit count")
        self.records = records
        self.source_state_label = source_state_label
        self.master_seed = int(master_seed)
        self.ensemble = first.ensemble
        self.num_qubits = first.num_qubits
        if _arrays is not None:
            self._outcomes, self._bases, self._symp, self._phases, self._vrows = _arrays
        else:
            self._outcomes = np.array([r.outcome_index for r in records], dtype=np.int64)
            self._vrows = None
            if self.ensemble == PAULI_ENSEMBLE:
                self._bases = np.stack([r.descriptor.as_ints() for r in records]).astype(np.int8)
                self._symp = self._phases = None
            else:
                self._bases = None
                self._symp = np.stack([r.descriptor.symplectic for r in records])
                self._phases = np.stack([r.descriptor.phases for r in records])

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    # -- serialization ---------------------------------------------------
    # Byte format (UTF-8, LF line endings):
    #   line 1:  '#shadowbank-v1 ' + JSON header
    #            {"ensemble", "qubits", "records", "seed", "label"}
    #   then one record per line: '<ensemble> <descriptor> <outcome>'
    #   pauli descriptor:    the n-character basis string over XYZ
    #   clifford descriptor: lowercase hex of the bits (symplectic matrix
    #     row-major, rows as in the tableau convention, then the 2n phase
    #     bits), packed most-significant-bit first and zero-padded to a
    #     whole byte
    #   outcome: n characters over 01, qubit 0 first

    def save(self, path) -> None:
        header = {
            "ensemble": self.ensemble,
            "qubits": self.num_qubits,
            "records": len(self),
            "seed": self.master_seed,
            "label": self.source_state_label,
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("#shadowbank-v1 " + json.dumps(header, sort_keys=True) + "\n")
            if self.ensemble == PAULI_ENSEMBLE:
                for r in self.records:
                    fh.write(f"{r.ensemble} {r.descriptor.bases} {r.outcome}\n")
            else:
                for r in self.records:
                    bits = np.concatenate(
                        [r.descriptor.symplectic.reshape(-1), r.descriptor.phases]
                    )
                    fh.write(f"{r.ensemble} {np.packbits(bits).tobytes().hex()} {r.outcome}\n")

    @classmethod
    def load(cls, path) -> "SnapshotBank":
        with open(path, "r", encoding="utf-8") as fh:
            head = fh.readline()
            if not head.startswith("#shadowbank-v1 "):
                raise ValueError(f"{path}: not a shadowbank-v1 file")
            header = json.loads(head[len("#shadowbank-v1 "):])
            n = int(header["qubits"])
            records = []
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                ensemble, desc_enc, outcome = parts
                if ensemble == PAULI_ENSEMBLE:
                    desc = PauliBasisString(desc_enc)
                else:
                    nn = 2 * n
                    bits = np.unpackbits(
                        np.frombuffer(bytes.fromhex(desc_enc), dtype=np.uint8),
                        count=nn * nn + nn,
                    )
                    desc = CliffordTableau(n, bits[: nn * nn].reshape(nn, nn), bits[nn * nn:])
                records.append(MeasurementRecord(ensemble, desc, outcome))
        if len(records) != int(header["records"]):
            raise ValueError(f"{path}: header promises {header['records']} records, found {len(records)}")
        return cls(records, header.get("label", ""), int(header.get("seed", 0)))

    # -- internal chunked access -----------------------------------------

    def _vrow_chunk(self, lo: int, hi: int) -> np.ndarray:
        """Rows U^dag|b> (conjugated) for records lo..hi, shape (hi-lo, 2^N)."""
        if self._vrows is not None:
            return self._vrows[lo:hi]
        phi, xc, zc, ac = ens.clifford_column_form(self._symp[lo:hi], self._phases[lo:hi])
        return ens.clifford_rows(phi, xc, zc, ac, self._outcomes[lo:hi]).conj()


# ---------------------------------------------------------------------------
# shot simulation
# ---------------------------------------------------------------------------

def _born_probabilities(probs: np.ndarray) -> np.ndarray:
    """Validate, clamp numerical dust, renormalize; probs is (..., d)."""
    sums = probs.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > 1e-10):
        raise ValueError("outcome probabilities do not sum to 1 within 1e-10")
    if np.any(probs < -_NEGATIVE_PROB_ATOL):
        raise ValueError("negative outcome probability beyond numerical tolerance")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum(axis=-1, keepdims=True)


def _sample_outcomes(probs: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling, one uniform per row."""
    cum = np.cumsum(probs, axis=-1)
    idx = (uniforms[:, None] > cum).sum(axis=-1)
    return np.minimum(idx, probs.shape[-1] - 1)


def simulate_shot(state, desc: UnitaryDescriptor, rng: np.random.Generator) -> MeasurementRecord:
    """Single Born-rule shot of the rotated state; state may be pure or a density matrix."""
    u = ens.basis_rotation_unitary(desc)
    if isinstance(state, PureState):
        probs = np.abs(u @ state.amplitudes) ** 2
    else:
        rot = u @ state.entries @ u.conj().T
        probs = np.real(np.diag(rot))
    probs = _born_probabilities(probs)
    idx = int(_sample_outcomes(probs[None, :], rng.random(1))[0])
    ensemble = PAULI_ENSEMBLE if isinstance(desc, PauliBasisString) else CLIFFORD_ENSEMBLE
    return MeasurementRecord(ensemble, desc, format(idx, f"0{desc.num_qubits}b"))


def _pauli_rotated_batch(state, bases: np.ndarray) -> np.ndarray:
    """Outcome probabilities (B, 2^n) after per-qubit basis rotations."""
    count, n = bases.shape
    d = 1 << n
    if isinstance(state, PureState):
        arr = np.broadcast_to(state.amplitudes, (count, d)).copy()
        for j in range(n):
            mats = ens._ROTATIONS_BY_INDEX[bases[:, j]]
            pre = 1 << j
            post = d >> (j + 1)
            arr = np.einsum(
                "bxy,bpyq->bpxq", mats, arr.reshape(count, pre, 2, post)
            ).reshape(count, d)
        return np.abs(arr) ** 2
    probs = np.empty((count, d))
    for i in range(count):
        u = ens.pauli_rotation_dense(bases[i])
        probs[i] = np.real(np.diag(u @ state.entries @ u.conj().T))
    return probs


def _clifford_probs_batch(state, phi, xcol, zcol, acol, symp, phases) -> np.ndarray:
    """Outcome probabilities (B, 2^n) for a batch of Clifford rotations."""
    d = phi.shape[1]
    if isinstance(state, PureState):
        amps = state.amplitudes
        support = np.flatnonzero(np.abs(amps) > 0)
        rotated = np.zeros_like(phi)
        for b0 in support:
            rotated += amps[b0] * ens.clifford_columns(phi, xcol, zcol, acol, int(b0))
        return np.abs(rotated) ** 2
    u = ens.clifford_dense_batch(symp, phases)
    rot = np.matmul(u, state.entries)
    return np.einsum("bij,bij->bi", rot, u.conj()).real


def stream_measurements(state, ensemble: str, shots: int, rng: np.random.Generator,
                        batch: int | None = None):
    """Simulate ``shots`` randomized measurements, yielding data in batches.

    All randomness is drawn up-front in a fixed, documented order
    (descriptor randomness first, then one Born uniform per shot), so
    results depend only on (state, ensemble, shots, rng state) and never
    on the internal batch size.

    Yields ``(lo, hi, descriptor_data, outcomes, vrows)`` per batch where
    ``descriptor_data`` is the basis-index array (Pauli) or the
    ``(symplectic, phases)`` pair (Clifford), ``outcomes`` are basis
    indices and ``vrows`` holds the conjugated rows U^dag|b> for
    Clifford batches (None for Pauli).
    """
    n = state.num_qubits
    d = 1 << n
    if ensemble not in ENSEMBLES:
        raise ValueError(f"unknown ensemble {ensemble!r}")
    if shots < 1:
        raise ValueError("need at least one shot")
    if batch is None:
        batch = max(512, (1 << 18) // d)
    if ensemble == PAULI_ENSEMBLE:
        bases = ens.sample_pauli_bases_batch(n, shots, rng)
        uniforms = rng.random(shots)
        for lo in range(0, shots, batch):
            hi = min(lo + batch, shots)
            probs = _born_probabilities(_pauli_rotated_batch(state, bases[lo:hi]))
            outs = _sample_outcomes(probs, uniforms[lo:hi])
            yield lo, hi, bases[lo:hi], outs, None
    else:
        symp, phases = ens.sample_cliffords_batch(n, shots, rng)
        uniforms = rng.random(shots)
        for lo in range(0, shots, batch):
            hi = min(lo + batch, shots)
            phi, xc, zc, ac = ens.clifford_column_form(symp[lo:hi], phases[lo:hi])
            probs = _born_probabilities(
                _clifford_probs_batch(state, phi, xc, zc, ac, symp[lo:hi], phases[lo:hi])
            )
            outs = _sample_outcomes(probs, uniforms[lo:hi])
            vrows = ens.clifford_rows(phi, xc, zc, ac, outs).conj()
            yield lo, hi, (symp[lo:hi], phases[lo:hi]), outs, vrows


def generate_bank(state, ensemble: str, shots: int, rng: np.random.Generator,
                  label: str = "", master_seed: int = 0,
                  cache_limit_bytes: int = 1 << 29) -> SnapshotBank:
    """Simulate a full bank; Clifford row vectors are cached in memory
    when they fit under ``cache_limit_bytes``."""
    n = state.num_qubits
    d = 1 << n
    records = []
    outcomes = np.empty(shots, dtype=np.int64)
    if ensemble == PAULI_ENSEMBLE:
        bases_all = np.empty((shots, n), dtype=np.int8)
        symp_all = phases_all = vrows = None
    else:
        bases_all = None
        symp_all = np.empty((shots, 2 * n, 2 * n), dtype=np.uint8)
        phases_all = np.empty((shots, 2 * n), dtype=np.uint8)
        vrows = np.empty((shots, d), dtype=complex) if shots * d * 16 <= cache_limit_bytes else None
    for lo, hi, desc_data, outs, vr in stream_measurements(state, ensemble, shots, rng):
        outcomes[lo:hi] = outs
        if ensemble == PAULI_ENSEMBLE:
            bases_all[lo:hi] = desc_data
            for i in range(lo, hi):
                bstr = "".join(ens.BASIS_LETTERS[k] for k in desc_data[i - lo])
                records.append(MeasurementRecord(
                    PAULI_ENSEMBLE, PauliBasisString(bstr), format(int(outs[i - lo]), f"0{n}b")))
        else:
            symp_all[lo:hi] = desc_data[0]
            phases_all[lo:hi] = desc_data[1]
            if vrows is not None:
                vrows[lo:hi] = vr
            for i in range(lo, hi):
                desc = CliffordTableau(n, desc_data[0][i - lo], desc_data[1][i - lo])
                records.append(MeasurementRecord(
                    CLIFFORD_ENSEMBLE, desc, format(int(outs[i - lo]), f"0{n}b")))
    return SnapshotBank(records, label, master_seed,
                        _arrays=(outcomes, bases_all, symp_all, phases_all, vrows))


# ---------------------------------------------------------------------------
# inverse channel / snapshot materialization
# ---------------------------------------------------------------------------

def invert_pauli(record: MeasurementRecord) -> HermitianOperator:
    """Dense snapshot tensor_j (3 u_j^dag |b_j><b_j| u_j - I); trace exactly 1."""
    if record.ensemble != PAULI_ENSEMBLE:
        raise ValueError("record was not taken with the Pauli ensemble")
    out = np.array([[1.0]], dtype=complex)
    for basis, bit in zip(record.descriptor.as_ints(), record.outcome):
        out = np.kron(out, _SNAPSHOT_FACTORS[basis, int(bit)])
    return HermitianOperator(record.num_qubits, out)


def invert_clifford(record: MeasurementRecord) -> HermitianOperator:
    """Dense snapshot (2^N + 1) U^dag |b><b| U - I; trace exactly 1."""
    if record.ensemble != CLIFFORD_ENSEMBLE:
        raise ValueError("record was not taken with the Clifford ensemble")
    n = record.num_qubits
    d = 1 << n
    u = ens.basis_rotation_unitary(record.descriptor)
    v = u.conj().T[:, record.outcome_index]
    return HermitianOperator(n, (d + 1) * np.outer(v, v.conj()) - np.eye(d))


def snapshot_dense(record: MeasurementRecord) -> HermitianOperator:
    if record.ensemble == PAULI_ENSEMBLE:
        return invert_pauli(record)
    return invert_clifford(record)


# ---------------------------------------------------------------------------
# estimation over banks
# ---------------------------------------------------------------------------

def _outcome_bits(outcomes: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1)
    return ((outcomes[:, None] >> shifts) & 1).astype(np.int8)


def _kron_chain(factors: np.ndarray) -> np.ndarray:
    """(C, m, 2, 2) per-qubit factors -> (C, 2^m, 2^m) tensor products."""
    count, m = factors.shape[:2]
    out = factors[:, 0]
    dim = 2
    for j in range(1, m):
        out = (out[:, :, None, :, None] * factors[:, j][:, None, :, None, :]).reshape(
            count, dim * 2, dim * 2)
        dim *= 2
    return out


def _check_real(vals: np.ndarray) -> np.ndarray:
    resid = np.max(np.abs(vals.imag)) if vals.size else 0.0
    if resid > IMAG_RESIDUE_ATOL:
        raise ValueError(f"per-shot values have imaginary residue {resid:.3e}")
    return vals.real


def _pauli_chunk(bank: SnapshotBank, lo: int, hi: int, m: int) -> np.ndarray:
    """Snapshots of the first m qubits for records lo..hi, (C, 2^m, 2^m)."""
    bits = _outcome_bits(bank._outcomes[lo:hi], bank.num_qubits)
    factors = _SNAPSHOT_FACTORS[bank._bases[lo:hi, :m], bits[:, :m]]
    return _kron_chain(factors)


def shot_values(bank: SnapshotBank, observables, chunk: int | None = None) -> np.ndarray:
    """Per-shot estimator values Tr(O rho_hat_i), shape (len(bank), len(observables))."""
    obs = list(observables)
    if not obs:
        raise ValueError("need at least one observable")
    n = bank.num_qubits
    d = 1 << n
    for o in obs:
        if o.num_qubits != n:
            raise ValueError("observable qubit count does not match bank")
    size = len(bank)
    if chunk is None:
        chunk = max(32, (1 << 22) // (d * d))
    out = np.empty((size, len(obs)))
    if bank.ensemble == PAULI_ENSEMBLE:
        # vec(rho_hat) . vec(O^T) computes the trace inner product
        omat = np.stack([o.entries.T.reshape(-1) for o in obs], axis=1)
        for lo in range(0, size, chunk):
            hi = min(lo + chunk, size)
            snaps = _pauli_chunk(bank, lo, hi, n)
            out[lo:hi] = _check_real(snaps.reshape(hi - lo, -1) @ omat)
    else:
        traces = np.array([np.trace(o.entries).real for o in obs])
        for lo in range(0, size, chunk):
            hi = min(lo + chunk, size)
            v = bank._vrow_chunk(lo, hi)
            for k, o in enumerate(obs):
                quad = np.einsum("bi,bi->b", v.conj() @ o.entries, v)
                out[lo:hi, k] = (d + 1) * _check_real(quad) - traces[k]
    return out


def block_shot_values(bank: SnapshotBank, block, chunk: int | None = None) -> np.ndarray:
    """Per-shot values of Tr((B otimes I) rho_hat) for block operator(s) B.

    Each block acts on the first m qubits (most significant side); the
    remaining qubits carry the identity.  This is the fast path for the
    embedded-witness family, where only the block projector fluctuates.
    ``block`` may be a single (2^m, 2^m) matrix or a list of same-size
    matrices; the per-shot snapshot work is then shared across them.
    Returns shape (S,) for a single block, (S, K) for a list.
    """
    single = not isinstance(block, (list, tuple))
    blocks = [np.asarray(block)] if single else [np.asarray(b) for b in block]
    n = bank.num_qubits
    d = 1 << n
    dm = blocks[0].shape[0]
    m = int(np.log2(dm))
    if 1 << m != dm or m > n:
        raise ValueError("block dimension must be a power of two within the register")
    if any(b.shape != (dm, dm) for b in blocks):
        raise ValueError("all blocks must share one size")
    size = len(bank)
    dr = d >> m
    out = np.empty((size, len(blocks)))
    if chunk is None:
        chunk = max(32, (1 << 22) // (dm * dm))
    if bank.ensemble == PAULI_ENSEMBLE:
        # idle-qubit snapshot factors have unit trace, so they drop out
        ovecs = np.stack([b.T.reshape(-1) for b in blocks], axis=1)
        for lo in range(0, size, chunk):
            hi = min(lo + chunk, size)
            snaps = _pauli_chunk(bank, lo, hi, m)
            out[lo:hi] = _check_real(snaps.reshape(hi - lo, -1) @ ovecs)
    else:
        for lo in range(0, size, chunk):
            hi = min(lo + chunk, size)
            v = bank._vrow_chunk(lo, hi).reshape(hi - lo, dm, dr)
            for k, b in enumerate(blocks):
                quad = np.einsum("bir,bir->b", v.conj(), np.matmul(b[None], v))
                out[lo:hi, k] = (d + 1) * _check_real(quad) - np.trace(b).real * dr
    return out[:, 0] if single else out


def estimate_expectation(obs: HermitianOperator, bank: SnapshotBank,
                         estimator: str = "mean", batches: int | None = None) -> float:
    """Estimate Tr(O rho) from a bank with the mean or median-of-means."""
    values = shot_values(bank, [obs])[:, 0]
    if estimator == "mean":
        return float(values.mean())
    if estimator == "median-of-means":
        from .stats import median_of_means
        if batches is None:
            raise ValueError("median-of-means needs a batch count")
        return median_of_means(values, batches)
    raise ValueError(f"unknown estimator {estimator!r}")


def reconstruct_density(bank: SnapshotBank, chunk: int | None = None) -> HermitianOperator:
    """Entrywise average of all snapshots (unit trace; possibly non-PSD)."""
    n = bank.num_qubits
    d = 1 << n
    size = len(bank)
    if chunk is None:
        chunk = max(32, (1 << 22) // (d * d))
    acc = np.zeros((d, d), dtype=complex)
    if bank.ensemble == PAULI_ENSEMBLE:
        for lo in range(0, size, chunk):
            acc += _pauli_chunk(bank, lo, min(lo + chunk, size), n).sum(axis=0)
    else:
        for lo in range(0, size, chunk):
            v = bank._vrow_chunk(lo, min(lo + chunk, size))
            acc += (d + 1) * (v.T @ v.conj())
        acc -= size * np.eye(d)
    return HermitianOperator(n, acc / size)


# ---------------------------------------------------------------------------
# exact channel computations (enumeration; small n)
# ---------------------------------------------------------------------------

def _pauli_settings(n: int):
    if n > 3:
        raise ValueError("exact Pauli enumeration limited to n <= 3")
    idx = np.arange(3 ** n)
    out = np.empty((3 ** n, n), dtype=np.int8)
    for j in range(n - 1, -1, -1):
        out[:, j] = idx % 3
        idx //= 3
    return out


def exact_forward_channel(rho: np.ndarray, ensemble: str, n: int) -> np.ndarray:
    """M(rho) = E_U sum_b <b|U rho U^dag|b> U^dag|b><b|U by enumeration."""
    d = 1 << n
    acc = np.zeros((d, d), dtype=complex)
    if ensemble == PAULI_ENSEMBLE:
        settings = _pauli_settings(n)
        for bases in settings:
            u = ens.pauli_rotation_dense(bases)
            probs = np.real(np.diag(u @ rho @ u.conj().T))
            acc += u.conj().T @ np.diag(probs) @ u
        return acc / len(settings)
    group = ens.enumerate_clifford_group(n)
    for tab in group:
        u = ens.basis_rotation_unitary(tab)
        probs = np.real(np.diag(u @ rho @ u.conj().T))
        acc += u.conj().T @ np.diag(probs) @ u
    return acc / len(group)


def exact_average_snapshot(rho: np.ndarray, ensemble: str, n: int) -> np.ndarray:
    """E[rho_hat] over all settings and outcomes, Born-weighted, by enumeration."""
    d = 1 << n
    acc = np.zeros((d, d), dtype=complex)
    if ensemble == PAULI_ENSEMBLE:
        settings = _pauli_settings(n)
        for bases in settings:
            u = ens.pauli_rotation_dense(bases)
            probs = np.real(np.diag(u @ rho @ u.conj().T))
            for b in range(d):
                rec = MeasurementRecord(
                    PAULI_ENSEMBLE,
                    PauliBasisString("".join(ens.BASIS_LETTERS[k] for k in bases)),
                    format(b, f"0{n}b"),
                )
                acc += probs[b] * invert_pauli(rec).entries
        return acc / len(settings)
    group = ens.enumerate_clifford_group(n)
    for tab in group:
        u = ens.basis_rotation_unitary(tab)
        probs = np.real(np.diag(u @ rho @ u.conj().T))
        udag = u.conj().T
        for b in range(d):
            v = udag[:, b]
            acc += probs[b] * ((d + 1) * np.outer(v, v.conj()) - np.eye(d))
    return acc / len(group)
