"""Iterative block inversion of dense symmetric positive definite matrices.

The package approximates a full inverse by sweeping exact block-inverse
updates over an (optionally overlapping) partition of the index range,
reusing the freshest approximation for each complement block.  It ships the
dense kernels the sweep is built on, covariance-kernel test-matrix
generators, convergence diagnostics with a flop-cost model, and a benchmark
CLI.
"""

from .analysis import (
    CostBreakdown,
    contraction_factor,
    flop_cost,
    lemma_error_recurrence_check,
    newton_schultz,
    spectral_radius_condition,
)
from .bench import (
    ExperimentRow,
    ExperimentSpec,
    compare_direct,
    emit_csv,
    run_experiment,
    spec_from_json,
)
from .exceptions import (
    DimensionMismatch,
    DuplicateWithinSet,
    IndexOutOfRange,
    InvalidHyperparameter,
    InvalidOverlap,
    IoError,
    NoConvergenceWarning,
    NotPerfectSquare,
    NotPositiveDefinite,
    OutOfMemoryBudget,
    TooManyBlocks,
    UncoveredIndices,
    ZeroPivot,
)
from .kernels import FAMILIES, KernelSpec, PointSet, grid_1d, grid_2d, kernel_matrix
from .linalg import (
    CholeskyFactor,
    LdlFactor,
    cholesky,
    chol_solve,
    condition_number_2,
    gather,
    ldlt,
    matmul,
    scatter_add_assign,
    spd_inverse,
    two_norm,
)
from .matio import load_csv, load_ibmi, load_matrix, save_csv, save_ibmi, save_matrix
from .partition import (
    Partition,
    complement,
    contiguous_partition,
    load_partition_json,
    red_black_partition,
    validate,
)
from .solver import (
    GUESS_CHOICES,
    IbmiConfig,
    SolveReport,
    block_update,
    error_estimate,
    initial_guess_identity,
    initial_guess_local_inverse,
    initial_guess_monte_carlo,
    initial_guess_takahashi,
    make_initial_guess,
    solve,
)

__version__ = "0.1.0"
