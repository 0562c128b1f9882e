"""Ring-topology mixing matrices, randomized gossip consensus, and
decentralized SGD simulation with a simulated wall clock."""

from .config import ConfigError, ExperimentConfig, echo_config, parse_config
from .harness import (
    BoundsReport,
    CellResult,
    SweepResult,
    cell_seed,
    run_sweep,
    verify_bounds,
)
from .mixing import (
    StochasticityReport,
    apply_mixing,
    build_ring_matrix,
    build_uniform_matrix,
    conjugate_by_permutation,
    permutation_for_step,
    sample_permutation,
    verify_doubly_stochastic,
)
from .objectives import (
    BatchDescriptor,
    LogisticObjective,
    QuadraticObjective,
    evaluate_loss,
    gradient_check,
    logistic_oracle,
    quadratic_oracle,
)
from .simulation import (
    CostModel,
    DivergenceError,
    RunConfig,
    RunResult,
    SimState,
    Strategy,
    TraceRecord,
    consensus_distance,
    initial_state,
    mixing_rho,
    run_training,
)
from .spectral import (
    ConsensusCurve,
    SpectralReport,
    fixed_consensus_curve,
    fixed_mixing_consensus_bound,
    monte_carlo_consensus,
    randomized_consensus_bound,
    randomized_frobenius_expectation,
    second_eigenvalue_ring,
    spectral_rho,
)

__version__ = "0.1.0"

__all__ = [
    "BatchDescriptor",
    "BoundsReport",
    "CellResult",
    "ConfigError",
    "ConsensusCurve",
    "CostModel",
    "DivergenceError",
    "ExperimentConfig",
    "LogisticObjective",
    "QuadraticObjective",
    "RunConfig",
    "RunResult",
    "SimState",
    "SpectralReport",
    "StochasticityReport",
    "Strategy",
    "SweepResult",
    "TraceRecord",
    "apply_mixing",
    "build_ring_matrix",
    "build_uniform_matrix",
    "cell_seed",
    "conjugate_by_permutation",
    "consensus_distance",
    "echo_config",
    "evaluate_loss",
    "fixed_consensus_curve",
    "fixed_mixing_consensus_bound",
    "gradient_check",
    "initial_state",
    "logistic_oracle",
    "mixing_rho",
    "monte_carlo_consensus",
    "parse_config",
    "permutation_for_step",
    "quadratic_oracle",
    "randomized_consensus_bound",
    "randomized_frobenius_expectation",
    "run_sweep",
    "run_training",
    "sample_permutation",
    "second_eigenvalue_ring",
    "spectral_rho",
    "verify_bounds",
    "verify_doubly_stochastic",
    "__version__",
]
