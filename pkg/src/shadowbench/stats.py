"""Bank statistics: empirical variance, shot budgets, shadow-norm bounds.

The closed-form bounds for the embedded witness family are

* local Pauli:     4^n           (n-local block, operator norm 1)
* global Clifford: 3 * 2^(N-n)   (Tr(O^2) = 2^(N-n) for the padded projector)

and the shot count needed for additive error epsilon with a mean
estimator is Var / epsilon^2.  All comparisons of empirical variances
against bounds are inequalities; the big-O constant in the
multi-observable budget is fixed to 1 and results carrying it are
bound-shaped estimates, not predictions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class VarianceReport:
    """Single-configuration variance summary row."""

    total_qubits: int
    block_size: int
    theta: float
    ensemble: str
    shots_used: int
    mean: float
    single_shot_variance: float
    s_req: float
    bound_pauli: float
    bound_clifford: float
    epsilon: float

    def __post_init__(self):
        if self.single_shot_variance < 0:
            raise ValueError("variance cannot be negative")
        expect = required_shots(self.single_shot_variance, self.epsilon)
        if not math.isclose(self.s_req, expect, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError("s_req is not variance / epsilon^2")


def empirical_variance(values) -> float:
    """Unbiased sample variance (divisor S - 1)."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("variance needs at least 2 values")
    return float(np.var(values, ddof=1))


def variance_standard_error(values) -> float:
    """Asymptotic standard error of the sample variance, sqrt((m4 - v^2)/S)."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("need at least 2 values")
    v = np.var(values, ddof=1)
    m4 = np.mean((values - values.mean()) ** 4)
    return float(np.sqrt(max(m4 - v * v, 0.0) / values.size))


def required_shots(variance: float, epsilon: float) -> float:
    """Shot count Var / epsilon^2 for additive error epsilon with the mean."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if variance < 0:
        raise ValueError("variance cannot be negative")
    return variance / epsilon ** 2


def pauli_norm_bound(n: int) -> float:
    """Shadow-norm bound 4^n for the n-local unit-norm witness block."""
    if n < 1:
        raise ValueError("block size must be at least 1")
    return float(4 ** n)


def clifford_norm_bound(total_qubits: int, n: int) -> float:
    """Shadow-norm bound 3 * 2^(N-n) from Tr(O^2) = 2^(N-n)."""
    if n > total_qubits:
        raise ValueError("block cannot exceed the register")
    if n < 1:
        raise ValueError("block size must be at least 1")
    return 3.0 * 2 ** (total_qubits - n)


def sample_complexity(num_observables: int, epsilon: float, norm_bound: float) -> float:
    """Bound-shaped budget max(ln M, 1) * bound / epsilon^2 (O(1) constant = 1)."""
    if num_observables < 1:
        raise ValueError("need at least one observable")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if norm_bound < 0:
        raise ValueError("norm bound cannot be negative")
    return max(math.log(num_observables), 1.0) * norm_bound / epsilon ** 2


class CrossoverPoint(NamedTuple):
    """Block sizes where the two ensemble bounds meet."""

    equal_exponents: float       # 4^n = 2^(N-n)      -> n = N/3
    with_clifford_factor: float  # 4^n = 3 * 2^(N-n)  -> n = (N + log2 3)/3


def crossover_block(total_qubits: int) -> CrossoverPoint:
    """Analytic bound-crossing block sizes for an N-qubit register."""
    if total_qubits < 2:
        raise ValueError("need at least 2 qubits")
    return CrossoverPoint(
        total_qubits / 3.0,
        (total_qubits + math.log2(3.0)) / 3.0,
    )


def median_of_means(values, batches: int) -> float:
    """Median of batch means over near-equal contiguous batches."""
    values = np.asarray(values, dtype=float)
    if batches < 1:
        raise ValueError("need at least one batch")
    if batches > values.size:
        raise ValueError(f"batch count {batches} exceeds {values.size} values")
    parts = np.array_split(values, batches)
    return float(np.median([p.mean() for p in parts]))


def make_variance_report(values, total_qubits: int, block_size: int, theta: float,
                         ensemble: str, epsilon: float) -> VarianceReport:
    """Summarize per-shot witness values from one bank into a report row."""
    values = np.asarray(values, dtype=float)
    var = empirical_variance(values)
    return VarianceReport(
        total_qubits=total_qubits,
        block_size=block_size,
        theta=float(theta),
        ensemble=ensemble,
        shots_used=int(values.size),
        mean=float(values.mean()),
        single_shot_variance=var,
        s_req=required_shots(var, epsilon),
        bound_pauli=pauli_norm_bound(block_size),
        bound_clifford=clifford_norm_bound(total_qubits, block_size),
        epsilon=float(epsilon),
    )
