"""shadowbench: classical-shadow estimation benchmarks for embedded
entanglement witnesses on small qubit registers."""

__version__ = "0.1.0"

from .states import (  # noqa: F401
    Bipartition,
    HermitianOperator,
    PureState,
    density,
    entanglement_entropy,
    expectation_value,
    make_ghz,
    make_theta_family,
    partial_trace,
    schmidt_max,
    tensor,
    tensor_pure,
)
from .ensembles import (  # noqa: F401
    CliffordTableau,
    PauliBasisString,
    basis_rotation_unitary,
    sample_clifford,
    sample_pauli_bases,
)
from .shadows import (  # noqa: F401
    MeasurementRecord,
    SnapshotBank,
    estimate_expectation,
    generate_bank,
    invert_clifford,
    invert_pauli,
    reconstruct_density,
    simulate_shot,
)
from .witness import (  # noqa: F401
    WitnessSpec,
    alpha_of_theta,
    embed_witness,
    find_separable_anchor,
    ghz_witness,
    perturbed_target,
    true_witness_value,
)
from .stats import (  # noqa: F401
    VarianceReport,
    clifford_norm_bound,
    crossover_block,
    empirical_variance,
    median_of_means,
    pauli_norm_bound,
    required_shots,
    sample_complexity,
)
