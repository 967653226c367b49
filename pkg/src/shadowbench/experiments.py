"""Experiment runner: the four numerical studies behind the benchmark.

1. ghz-reconstruct     density-matrix reconstruction of a GHZ register
2. entropy-discrepancy estimation error of a state-projector family vs
                       the entanglement entropy of the target
3. error-vs-shots      witness estimation error against snapshot usage
4. crossover           empirical single-shot variance, required shots
                       S_req = Var / eps^2 and ensemble crossover in the
                       witness block size

Determinism contract: every bank stream is derived from the master seed
and a tuple of small integers (experiment code, register size, ensemble
index, replica, prepared-block size, theta index), so identical config
plus seed reproduce identical result rows up to wall-time columns, and
byte-identical plot-data CSVs.

Banks are generated once per distinct prepared state and re-used for
every observable evaluated on them; with the default matched
preparation the crossover study therefore generates one bank per
(n, theta, ensemble) point, while the ghz preparation shares one bank
per ensemble across the whole grid.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import EXPERIMENT_CODES, ExperimentConfig
from .seeding import derive_rng
from .shadows import block_shot_values, generate_bank, reconstruct_density
from .states import (
    Bipartition,
    PureState,
    basis_state,
    density,
    entanglement_entropy,
    expectation_value,
    make_ghz,
    make_theta_family,
    tensor_pure,
)
from .stats import (
    clifford_norm_bound,
    crossover_block,
    empirical_variance,
    make_variance_report,
    median_of_means,
    pauli_norm_bound,
    required_shots,
    variance_standard_error,
)
from .witness import embed_witness, true_witness_value

ENSEMBLE_INDEX = {"pauli": 0, "clifford": 1}


@dataclass
class ResultRow:
    """One metric at one grid point; long-format row of the results table."""

    experiment: str
    qubits: int
    block: int | None
    theta: float | None
    ensemble: str | None
    shots: int | None
    replica: int | None
    metric: str
    value: float
    stderr: float | None
    wall_time_s: float
    seed: int
    version: str


RESULT_COLUMNS = ["experiment", "qubits", "block", "theta", "ensemble", "shots",
                  "replica", "metric", "value", "stderr", "wall_time_s", "seed", "version"]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    return path


def write_results(rows, cfg: ExperimentConfig) -> Path:
    path = Path(cfg.out) / f"{cfg.experiment}_results.csv"
    _write_csv(path, RESULT_COLUMNS,
               [[getattr(r, c) for c in RESULT_COLUMNS] for r in rows])
    meta = Path(cfg.out) / "metadata.json"
    with open(meta, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(cfg.metadata(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def emit_plot_data(table, kind: str, out_dir) -> list:
    """Write the per-figure CSV (the contract) and a best-effort figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not table:
        raise ValueError("empty table")
    written = []
    if kind == "ghz-reconstruct":
        ideal, recon = table["ideal_real"], table["reconstructed_real"]
        written.append(_write_csv(out_dir / "ghz_reconstruct_ideal_real.csv",
                                  [f"c{j}" for j in range(ideal.shape[1])], ideal.tolist()))
        written.append(_write_csv(out_dir / "ghz_reconstruct_estimate_real.csv",
                                  [f"c{j}" for j in range(recon.shape[1])], recon.tolist()))
    elif kind == "entropy-discrepancy":
        header = ["theta", "s_a", "delta_pauli", "delta_clifford", "bound_pauli", "bound_clifford"]
        written.append(_write_csv(out_dir / "entropy_discrepancy_curve.csv", header,
                                  [[r[c] for c in header] for r in table["curve"]]))
    elif kind == "error-vs-shots":
        header = ["block", "theta", "ensemble", "shots", "error_mean", "error_stderr"]
        written.append(_write_csv(out_dir / "error_vs_shots_curves.csv", header,
                                  [[r[c] for c in header] for r in table["curves"]]))
    elif kind == "crossover":
        for n_qubits, rows in sorted(table["per_qubits"].items()):
            header = ["block", "ensemble", "s_req", "s_req_stderr", "bound_s_req"]
            written.append(_write_csv(out_dir / f"crossover_N{n_qubits}.csv", header,
                                      [[r[c] for c in header] for r in rows]))
        header = ["qubits", "empirical_crossover_block", "sign_changes",
                  "bound_crossing_equal", "bound_crossing_with_factor"]
        written.append(_write_csv(out_dir / "crossover_summary.csv", header,
                                  [[r[c] for c in header] for r in table["summary"]]))
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    try:
        from . import plotting
        written.extend(plotting.render(table, kind, out_dir))
    except Exception as exc:  # figure rendering is best-effort
        import sys
        print(f"warning: figure rendering failed: {exc}", file=sys.stderr)
    return written


# ---------------------------------------------------------------------------
# prepared states and bank streams
# ---------------------------------------------------------------------------

def prepared_state(cfg: ExperimentConfig, n_qubits: int, block: int, theta: float):
    """The state the bank is generated from, plus its label and rng key part.

    ``matched``: the witness target on its block, padded with |0...0>;
    the block size / angle may be pinned via state-block / state-theta.
    ``ghz``: the GHZ state on the full register.
    """
    from .witness import perturbed_target
    if cfg.prepared_state == "ghz":
        return make_ghz(n_qubits), f"ghz{n_qubits}", (0, 0)
    if cfg.prepared_state == "plus":
        d = 1 << n_qubits
        amps = np.full(d, 1.0 / np.sqrt(d), dtype=complex)
        return PureState(n_qubits, amps), f"plus{n_qubits}", (0, 0)
    nb = cfg.state_block if cfg.state_block is not None else block
    th = cfg.state_theta if cfg.state_theta is not None else theta
    blk = perturbed_target(nb, th)
    state = tensor_pure(blk, basis_state(n_qubits - nb)) if nb < n_qubits else blk
    thetas = cfg.thetas()
    th_idx = thetas.index(th) + 1 if th in thetas else 0
    return state, f"pert(n={nb},theta={float(th)!r})+pad{n_qubits - nb}", (nb, th_idx)


def _bank_for(cfg: ExperimentConfig, n_qubits: int, ensemble: str, replica: int,
              state, label: str, key_part, shots: int):
    code = EXPERIMENT_CODES[cfg.experiment]
    rng = derive_rng(cfg.seed, code, n_qubits, ENSEMBLE_INDEX[ensemble], replica, *key_part)
    return generate_bank(state, ensemble, shots, rng, label=label, master_seed=cfg.seed)


def _point_estimate(values: np.ndarray, cfg: ExperimentConfig) -> float:
    if cfg.estimator == "median-of-means":
        return median_of_means(values, cfg.batches)
    return float(values.mean())


def _run_tasks(worker, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, tasks, chunksize=1))


# ---------------------------------------------------------------------------
# experiment 1: GHZ reconstruction
# ---------------------------------------------------------------------------

def run_ghz_reconstruct(cfg: ExperimentConfig):
    cfg.validate()
    n = cfg.qubits[0]
    shots = cfg.shots[-1]
    ensemble = cfg.ensembles[0]
    t0 = time.perf_counter()
    ghz = make_ghz(n)
    bank = _bank_for(cfg, n, ensemble, 0, ghz, f"ghz{n}", (0, 0), shots)
    recon = reconstruct_density(bank).entries
    ideal = density(ghz).entries
    elapsed = time.perf_counter() - t0

    d = 1 << n
    corners = [(0, 0), (0, d - 1), (d - 1, 0), (d - 1, d - 1)]
    support = np.zeros((d, d), dtype=bool)
    for i, j in corners:
        support[i, j] = True
    corner_err = max(abs(recon[i, j].real - 0.5) for i, j in corners)
    off_max = float(np.max(np.abs(recon[~support])))
    trace_err = abs(np.trace(recon).real - 1.0)

    mk = lambda metric, value: ResultRow(cfg.experiment, n, None, None, ensemble, shots,
                                         0, metric, value, None, elapsed, cfg.seed, __version__)
    rows = [
        mk("corner_abs_error_max", corner_err),
        mk("off_support_abs_max", off_max),
        mk("trace_error", trace_err),
    ]
    for i, j in corners:
        rows.append(mk(f"corner_real_{i}_{j}", float(recon[i, j].real)))
    table = {"ideal_real": ideal.real, "reconstructed_real": recon.real,
             "qubits": n, "shots": shots}
    write_results(rows, cfg)
    emit_plot_data(table, "ghz-reconstruct", cfg.out)
    return rows, table


# ---------------------------------------------------------------------------
# experiment 2: discrepancy vs entanglement entropy
# ---------------------------------------------------------------------------

def _entropy_task(arg):
    cfg, n, ensemble, replica = arg
    t0 = time.perf_counter()
    thetas = cfg.thetas()
    shots = cfg.shots[-1]
    deltas = np.empty(len(thetas))
    if cfg.prepared_state in ("ghz", "plus"):
        state, label, key = prepared_state(cfg, n, 2, thetas[0])
        bank = _bank_for(cfg, n, ensemble, replica, state, label, key, shots)
        projectors = [density(make_theta_family(n, th)).entries for th in thetas]
        vals = block_shot_values(bank, projectors)
        for k, th in enumerate(thetas):
            truth = abs(np.vdot(make_theta_family(n, th).amplitudes, state.amplitudes)) ** 2
            deltas[k] = abs(_point_estimate(vals[:, k], cfg) - truth)
    else:
        for k, th in enumerate(thetas):
            target = make_theta_family(n, th)
            bank = _bank_for(cfg, n, ensemble, replica, target,
                             f"theta-family(n={n},theta={float(th)!r})", (n, k + 1), shots)
            vals = block_shot_values(bank, density(target).entries)
            deltas[k] = abs(_point_estimate(vals, cfg) - 1.0)
    return deltas, time.perf_counter() - t0


def run_entropy_discrepancy(cfg: ExperimentConfig):
    cfg.validate()
    n = cfg.qubits[0]
    thetas = cfg.thetas()
    shots = cfg.shots[-1]
    tasks = [(cfg, n, e, r) for e in cfg.ensembles for r in range(cfg.replicas)]
    results = _run_tasks(_entropy_task, tasks, cfg.workers)

    entropies = [entanglement_entropy(make_theta_family(n, th), Bipartition.from_keep([0], n))
                 for th in thetas]
    rows = []
    per_ensemble = {}
    for (cfg_, n_, ensemble, replica), (deltas, elapsed) in zip(tasks, results):
        per_ensemble.setdefault(ensemble, []).append(deltas)
        for k, th in enumerate(thetas):
            rows.append(ResultRow(cfg.experiment, n, None, th, ensemble, shots, replica,
                                  "discrepancy", float(deltas[k]), None, elapsed,
                                  cfg.seed, __version__))
    curve = []
    for k, th in enumerate(thetas):
        entry = {"theta": th, "s_a": entropies[k],
                 "delta_pauli": None, "delta_clifford": None,
                 "bound_pauli": float(np.sqrt(4.0 ** n / shots)),
                 "bound_clifford": float(np.sqrt(3.0 / shots))}
        for ensemble, stack in per_ensemble.items():
            arr = np.stack(stack)[:, k]
            mean = float(arr.mean())
            se = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else None
            entry[f"delta_{ensemble}"] = mean
            rows.append(ResultRow(cfg.experiment, n, None, th, ensemble, shots, None,
                                  "discrepancy_mean", mean, se, 0.0, cfg.seed, __version__))
        rows.append(ResultRow(cfg.experiment, n, None, th, None, shots, None,
                              "entanglement_entropy", entropies[k], None, 0.0,
                              cfg.seed, __version__))
        curve.append(entry)
    table = {"curve": curve, "qubits": n, "shots": shots,
             "per_replica": {e: np.stack(v) for e, v in per_ensemble.items()},
             "thetas": thetas, "entropies": entropies}
    write_results(rows, cfg)
    emit_plot_data(table, "entropy-discrepancy", cfg.out)
    return rows, table


# ---------------------------------------------------------------------------
# experiment 3: estimation error vs snapshot usage
# ---------------------------------------------------------------------------

def _error_task(arg):
    cfg, n, block, th_idx, ensemble, replica = arg
    t0 = time.perf_counter()
    theta = cfg.thetas()[th_idx]
    spec = embed_witness(block, n, theta)
    state, label, key = prepared_state(cfg, n, block, theta)
    bank = _bank_for(cfg, n, ensemble, replica, state, label, key, cfg.shots[-1])
    w_true = true_witness_value(spec, density(state))
    values = spec.alpha - block_shot_values(bank, spec.block_projector)
    errs = np.empty(len(cfg.shots))
    for i, s in enumerate(cfg.shots):
        errs[i] = abs(_point_estimate(values[:s], cfg) - w_true)
    return errs, time.perf_counter() - t0


def run_error_vs_shots(cfg: ExperimentConfig):
    cfg.validate()
    n = cfg.qubits[0]
    blocks = cfg.blocks_for(n)
    thetas = cfg.thetas()
    tasks = [(cfg, n, b, ti, e, r)
             for b in blocks for ti in range(len(thetas))
             for e in cfg.ensembles for r in range(cfg.replicas)]
    results = _run_tasks(_error_task, tasks, cfg.workers)

    rows = []
    curves = {}
    for (cfg_, n_, block, ti, ensemble, replica), (errs, elapsed) in zip(tasks, results):
        theta = thetas[ti]
        curves.setdefault((block, theta, ensemble), []).append(errs)
        for i, s in enumerate(cfg.shots):
            rows.append(ResultRow(cfg.experiment, n, block, theta, ensemble, s, replica,
                                  "abs_error", float(errs[i]), None, elapsed,
                                  cfg.seed, __version__))
    curve_rows = []
    for (block, theta, ensemble), stack in sorted(curves.items()):
        arr = np.stack(stack)
        mean = arr.mean(axis=0)
        se = arr.std(ddof=1, axis=0) / np.sqrt(arr.shape[0]) if arr.shape[0] > 1 else np.zeros(arr.shape[1])
        for i, s in enumerate(cfg.shots):
            curve_rows.append({"block": block, "theta": theta, "ensemble": ensemble,
                               "shots": s, "error_mean": float(mean[i]),
                               "error_stderr": float(se[i])})
            rows.append(ResultRow(cfg.experiment, n, block, theta, ensemble, s, None,
                                  "abs_error_mean", float(mean[i]), float(se[i]),
                                  0.0, cfg.seed, __version__))
        slope = float(np.polyfit(np.log(cfg.shots), np.log(np.maximum(mean, 1e-300)), 1)[0])
        rows.append(ResultRow(cfg.experiment, n, block, theta, ensemble, None, None,
                              "loglog_slope", slope, None, 0.0, cfg.seed, __version__))
    table = {"curves": curve_rows, "qubits": n, "shots": cfg.shots}
    write_results(rows, cfg)
    _write_witness_manifest(cfg, [(b, th) for b in blocks for th in thetas], n)
    emit_plot_data(table, "error-vs-shots", cfg.out)
    return rows, table


# ---------------------------------------------------------------------------
# experiment 4: variance, required shots, crossover
# ---------------------------------------------------------------------------

def _crossover_point_task(arg):
    """Matched preparation: one bank per (N, n, theta, ensemble, replica)."""
    cfg, n, block, th_idx, ensemble, replica = arg
    t0 = time.perf_counter()
    theta = cfg.thetas()[th_idx]
    spec = embed_witness(block, n, theta)
    state, label, key = prepared_state(cfg, n, block, theta)
    bank = _bank_for(cfg, n, ensemble, replica, state, label, key, cfg.shots[-1])
    values = spec.alpha - block_shot_values(bank, spec.block_projector)
    rep = make_variance_report(values, n, block, theta, ensemble, cfg.epsilon)
    return (rep.mean, rep.single_shot_variance,
            variance_standard_error(values), time.perf_counter() - t0)


def _crossover_bank_task(arg):
    """Shared preparation (ghz / pinned): one bank serves every (n, theta)."""
    cfg, n, ensemble, replica = arg
    t0 = time.perf_counter()
    state, label, key = prepared_state(cfg, n, cfg.blocks_for(n)[0], cfg.thetas()[0])
    bank = _bank_for(cfg, n, ensemble, replica, state, label, key, cfg.shots[-1])
    out = {}
    for block in cfg.blocks_for(n):
        specs = [embed_witness(block, n, theta) for theta in cfg.thetas()]
        vals = block_shot_values(bank, [s.block_projector for s in specs])
        for ti, spec in enumerate(specs):
            values = spec.alpha - vals[:, ti]
            out[(block, ti)] = (float(values.mean()), empirical_variance(values),
                                variance_standard_error(values))
    return out, time.perf_counter() - t0


def _shared_banks(cfg: ExperimentConfig) -> bool:
    return cfg.prepared_state == "ghz" or (
        cfg.state_block is not None and cfg.state_theta is not None)


def run_crossover(cfg: ExperimentConfig):
    cfg.validate()
    thetas = cfg.thetas()
    shots = cfg.shots[-1]
    rows = []
    per_qubits = {}
    summary = []
    for n in cfg.qubits:
        blocks = cfg.blocks_for(n)
        point = {}
        if _shared_banks(cfg):
            tasks = [(cfg, n, e, r) for e in cfg.ensembles for r in range(cfg.replicas)]
            results = _run_tasks(_crossover_bank_task, tasks, cfg.workers)
            for (cfg_, n_, ensemble, replica), (data, elapsed) in zip(tasks, results):
                for (block, ti), (mean, var, vse) in data.items():
                    point.setdefault((block, ti, ensemble), []).append((mean, var, vse, elapsed))
        else:
            tasks = [(cfg, n, b, ti, e, r) for b in blocks for ti in range(len(thetas))
                     for e in cfg.ensembles for r in range(cfg.replicas)]
            results = _run_tasks(_crossover_point_task, tasks, cfg.workers)
            for (cfg_, n_, block, ti, ensemble, replica), res in zip(tasks, results):
                point.setdefault((block, ti, ensemble), []).append(res)

        agg = {}
        for (block, ti, ensemble), reps in sorted(point.items()):
            theta = thetas[ti]
            var = float(np.mean([r[1] for r in reps]))
            vse = float(np.sqrt(np.mean([r[2] ** 2 for r in reps]) / len(reps)))
            mean = float(np.mean([r[0] for r in reps]))
            elapsed = float(np.sum([r[3] for r in reps]))
            s_req = required_shots(var, cfg.epsilon)
            bound = (pauli_norm_bound(block) if ensemble == "pauli"
                     else clifford_norm_bound(n, block))
            for metric, value, se in [
                ("witness_mean", mean, None),
                ("single_shot_variance", var, vse),
                ("s_req", s_req, vse / cfg.epsilon ** 2),
                ("norm_bound", bound, None),
                ("bound_pauli", pauli_norm_bound(block), None),
                ("bound_clifford", clifford_norm_bound(n, block), None),
            ]:
                rows.append(ResultRow(cfg.experiment, n, block, theta, ensemble, shots,
                                      None, metric, value, se, elapsed, cfg.seed, __version__))
            agg.setdefault((block, ensemble), []).append((var, vse))

        plot_rows = []
        sreq_by_ens = {e: {} for e in cfg.ensembles}
        for (block, ensemble), pts in sorted(agg.items()):
            k = int(np.argmax([v for v, _ in pts]))
            var_max, vse_max = pts[k]
            s_req = required_shots(var_max, cfg.epsilon)
            se_req = vse_max / cfg.epsilon ** 2
            bound = (pauli_norm_bound(block) if ensemble == "pauli"
                     else clifford_norm_bound(n, block))
            sreq_by_ens[ensemble][block] = (s_req, se_req)
            plot_rows.append({"block": block, "ensemble": ensemble, "s_req": s_req,
                              "s_req_stderr": se_req,
                              "bound_s_req": required_shots(bound, cfg.epsilon)})
            rows.append(ResultRow(cfg.experiment, n, block, None, ensemble, shots, None,
                                  "s_req_max_theta", s_req, se_req, 0.0, cfg.seed, __version__))
        per_qubits[n] = plot_rows

        crossing = None
        sign_changes = 0
        if len(cfg.ensembles) == 2:
            diffs = [sreq_by_ens["pauli"][b][0] - sreq_by_ens["clifford"][b][0] for b in blocks]
            signs = np.sign(diffs)
            sign_changes = int(np.sum(signs[1:] != signs[:-1]))
            for b in blocks:
                if sreq_by_ens["clifford"][b][0] <= sreq_by_ens["pauli"][b][0]:
                    crossing = b
                    break
        cb = crossover_block(n)
        summary.append({"qubits": n,
                        "empirical_crossover_block": crossing,
                        "sign_changes": sign_changes,
                        "bound_crossing_equal": cb.equal_exponents,
                        "bound_crossing_with_factor": cb.with_clifford_factor})
        for metric, value in [("empirical_crossover_block", crossing),
                              ("sign_changes", sign_changes),
                              ("bound_crossing_equal", cb.equal_exponents),
                              ("bound_crossing_with_factor", cb.with_clifford_factor)]:
            if value is not None:
                rows.append(ResultRow(cfg.experiment, n, None, None, None, shots, None,
                                      metric, float(value), None, 0.0, cfg.seed, __version__))
    table = {"per_qubits": per_qubits, "summary": summary, "epsilon": cfg.epsilon}
    write_results(rows, cfg)
    pairs = []
    for n in cfg.qubits:
        pairs.extend(((b, th), n) for b in cfg.blocks_for(n) for th in thetas)
    _write_witness_manifest(cfg, [p for p, _ in pairs],
                            None, qubits_per_pair=[q for _, q in pairs])
    emit_plot_data(table, "crossover", cfg.out)
    return rows, table


def _write_witness_manifest(cfg: ExperimentConfig, pairs, n_qubits,
                            qubits_per_pair=None) -> Path:
    """One structured text record per witness used by the run."""
    path = Path(cfg.out) / "witness_manifest.txt"
    seen = set()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, (block, theta) in enumerate(pairs):
            total = n_qubits if qubits_per_pair is None else qubits_per_pair[i]
            key = (total, block, float(theta))
            if key in seen:
                continue
            seen.add(key)
            fh.write(embed_witness(block, total, theta).describe() + "\n")
    return path


RUNNERS = {
    "ghz-reconstruct": run_ghz_reconstruct,
    "entropy-discrepancy": run_entropy_discrepancy,
    "error-vs-shots": run_error_vs_shots,
    "crossover": run_crossover,
}


def run_experiment(cfg: ExperimentConfig):
    return RUNNERS[cfg.experiment](cfg)
