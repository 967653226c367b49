"""Experiment configuration: flat key-value files, defaults, validation.

Config files are plain text, one ``key = value`` per line, ``#`` starts
a comment.  Lists are comma-separated.  Keys:

    experiment      ghz-reconstruct | entropy-discrepancy | error-vs-shots | crossover
    qubits          register sizes, e.g. ``6,7`` (most experiments use one)
    block-grid      witness block sizes; default 2..N per register size
    theta-grid      explicit perturbation angles in radians
    theta-points    alternatively: count of even points on [0, pi/4]
    ensembles       subset of ``pauli,clifford``
    shots           snapshot schedule, strictly increasing
    epsilon         target additive error (default 0.01)
    seed            master seed (unsigned 64-bit)
    replicas        independent seed replicas to average over
    estimator       mean | median-of-means
    batches         batch count for median-of-means
    prepared-state  matched | ghz | plus  (matched: the state the target
                    projector describes, block-padded with |0>; ghz: GHZ on
                    the full register; plus: the |+>^N product state)
    state-block     pin the prepared block size (default: match the witness)
    state-theta     pin the prepared block angle (default: match the witness)
    out             output directory
    workers         worker processes for the point/replica fan-out

Unknown keys fail validation; every experiment validates its full
configuration before any computation starts.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

EXPERIMENTS = ("ghz-reconstruct", "entropy-discrepancy", "error-vs-shots", "crossover")
EXPERIMENT_CODES = {name: i + 1 for i, name in enumerate(EXPERIMENTS)}
PREPARED_STATES = ("matched", "ghz", "plus")
ESTIMATORS = ("mean", "median-of-means")
MAX_ENGINE_QUBITS = 8


class ConfigError(ValueError):
    """Invalid experiment configuration; message lists every problem found."""


_DEFAULTS = {
    "ghz-reconstruct": dict(qubits=[3], shots=[5000], ensembles=["clifford"], replicas=1,
                            theta_grid=[0.0], block_grid=None, prepared_state="ghz"),
    "entropy-discrepancy": dict(qubits=[4], shots=[5000], ensembles=["pauli", "clifford"],
                                replicas=20, theta_grid=None, block_grid=None,
                                prepared_state="plus"),
    "error-vs-shots": dict(qubits=[6], shots=[100, 316, 1000, 3162, 10000],
                           ensembles=["pauli", "clifford"], replicas=20,
                           theta_grid=[0.3], block_grid=None, prepared_state="matched"),
    "crossover": dict(qubits=[6, 7], shots=[10000], ensembles=["pauli", "clifford"],
                      replicas=1, theta_grid=None, block_grid=None,
                      prepared_state="matched"),
}


@dataclass
class ExperimentConfig:
    experiment: str
    qubits: list
    shots: list
    ensembles: list
    replicas: int
    theta_grid: list | None = None
    theta_points: int | None = None
    block_grid: list | None = None
    epsilon: float = 0.01
    seed: int = 0
    estimator: str = "mean"
    batches: int | None = None
    prepared_state: str = "matched"
    state_block: int | None = None
    state_theta: float | None = None
    out: Path = field(default_factory=lambda: Path("out"))
    workers: int = 1

    def thetas(self) -> list:
        if self.theta_grid is not None:
            return list(self.theta_grid)
        k = self.theta_points if self.theta_points else 8
        return [i * (math.pi / 4) / (k - 1) for i in range(k)] if k > 1 else [0.0]

    def blocks_for(self, n_qubits: int) -> list:
        if self.block_grid is not None:
            return [b for b in self.block_grid if b <= n_qubits]
        return list(range(2, n_qubits + 1))

    def validate(self) -> "ExperimentConfig":
        problems = []
        if self.experiment not in EXPERIMENTS:
            problems.append(f"unknown experiment {self.experiment!r}")
        if not self.qubits:
            problems.append("qubits grid is empty")
        for n in self.qubits:
            if not 2 <= n <= MAX_ENGINE_QUBITS:
                problems.append(f"qubits={n} outside supported 2..{MAX_ENGINE_QUBITS}")
        if not self.shots:
            problems.append("shots schedule is empty")
        elif any(b <= a for a, b in zip(self.shots, self.shots[1:])):
            problems.append(f"shots schedule {self.shots} is not strictly increasing")
        elif self.shots[0] < 2:
            problems.append("shots entries must be at least 2")
        if not self.ensembles:
            problems.append("ensembles list is empty")
        for e in self.ensembles:
            if e not in ("pauli", "clifford"):
                problems.append(f"unknown ensemble {e!r}")
        if self.replicas < 1:
            problems.append("replicas must be at least 1")
        if self.epsilon <= 0:
            problems.append("epsilon must be positive")
        if not 0 <= self.seed < 2 ** 64:
            problems.append("seed must be an unsigned 64-bit integer")
        if self.estimator not in ESTIMATORS:
            problems.append(f"unknown estimator {self.estimator!r}")
        if self.estimator == "median-of-means" and (self.batches is None or self.batches < 1):
            problems.append("median-of-means needs a positive batches count")
        if self.prepared_state not in PREPARED_STATES:
            problems.append(f"unknown prepared-state {self.prepared_state!r}")
        if self.theta_grid is not None:
            for t in self.theta_grid:
                if not 0 <= t < math.pi / 2:
                    problems.append(f"theta {t} outside [0, pi/2)")
            if not self.theta_grid:
                problems.append("theta-grid is empty")
        if self.theta_points is not None and self.theta_points < 1:
            problems.append("theta-points must be positive")
        if self.block_grid is not None:
            if not self.block_grid:
                problems.append("block-grid is empty")
            for b in self.block_grid:
                if b < 2:
                    problems.append(f"block size {b} below 2")
            if self.qubits and all(b > max(self.qubits) for b in self.block_grid):
                problems.append("no block-grid entry fits any register size")
        if self.state_block is not None and self.state_block < 2:
            problems.append("state-block must be at least 2")
        if self.state_theta is not None and not 0 <= self.state_theta < math.pi / 2:
            problems.append(f"state-theta {self.state_theta} outside [0, pi/2)")
        if self.workers < 1:
            problems.append("workers must be at least 1")
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    def config_hash(self) -> str:
        payload = {k: (str(v) if isinstance(v, Path) else v) for k, v in asdict(self).items()}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]

    def metadata(self) -> dict:
        payload = {k: (str(v) if isinstance(v, Path) else v) for k, v in asdict(self).items()}
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "version": _package_version(),
            "config_hash": self.config_hash(),
            "config": payload,
            "theta_grid_resolved": self.thetas(),
        }


def _package_version() -> str:
    from . import __version__
    return __version__


def default_config(experiment: str) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    d = _DEFAULTS[experiment]
    return ExperimentConfig(
        experiment=experiment,
        qubits=list(d["qubits"]),
        shots=list(d["shots"]),
        ensembles=list(d["ensembles"]),
        replicas=d["replicas"],
        theta_grid=d["theta_grid"],
        block_grid=d["block_grid"],
        prepared_state=d["prepared_state"],
    )


_INT_LIST_KEYS = {"qubits", "block-grid", "shots"}
_FLOAT_LIST_KEYS = {"theta-grid"}
_INT_KEYS = {"seed", "replicas", "theta-points", "batches", "state-block", "workers"}
_FLOAT_KEYS = {"epsilon", "state-theta"}
_STR_KEYS = {"experiment", "estimator", "prepared-state", "out"}
_LIST_STR_KEYS = {"ensembles"}
_ALL_KEYS = _INT_LIST_KEYS | _FLOAT_LIST_KEYS | _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _LIST_STR_KEYS


def parse_config_text(text: str, origin: str = "<config>") -> dict:
    """Parse the flat key-value format into a raw mapping."""
    out = {}
    problems = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
            continue
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _ALL_KEYS:
            problems.append(f"{origin}:{lineno}: unknown key {key!r}")
            continue
        try:
            if key in _INT_LIST_KEYS:
                out[key] = [int(v) for v in value.split(",") if v.strip()]
            elif key in _FLOAT_LIST_KEYS:
                out[key] = [float(v) for v in value.split(",") if v.strip()]
            elif key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            elif key in _LIST_STR_KEYS:
                out[key] = [v.strip().lower() for v in value.split(",") if v.strip()]
            else:
                out[key] = value
        except ValueError:
            problems.append(f"{origin}:{lineno}: cannot parse value {value!r} for {key!r}")
    if problems:
        raise ConfigError("; ".join(problems))
    return out


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Build and validate a config from file + CLI overrides."""
    raw = {}
    if path is not None:
        raw = parse_config_text(Path(path).read_text(), origin=str(path))
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    if "experiment" not in raw:
        raise ConfigError("missing required key 'experiment'")
    cfg = default_config(raw["experiment"])
    setters = {
        "qubits": "qubits", "block-grid": "block_grid", "shots": "shots",
        "theta-grid": "theta_grid", "theta-points": "theta_points",
        "ensembles": "ensembles", "epsilon": "epsilon", "seed": "seed",
        "replicas": "replicas", "estimator": "estimator", "batches": "batches",
        "prepared-state": "prepared_state", "state-block": "state_block",
        "state-theta": "state_theta", "workers": "workers",
    }
    for key, attr in setters.items():
        if key in raw:
            setattr(cfg, attr, raw[key])
    if "out" in raw:
        cfg.out = Path(raw["out"])
    if cfg.theta_grid is not None and "theta-points" in raw and "theta-grid" not in raw:
        cfg.theta_grid = None
    return cfg.validate()
