"""Variance uncertainty relations for small quantum systems.

The package evaluates, verifies, and ranks lower bounds on sums and
products of observable variances: exact matrix arithmetic in
:mod:`uncrel.core` and :mod:`uncrel.relations`, single-qubit closed forms
in :mod:`uncrel.qubit`, finite-shot simulation in :mod:`uncrel.shots`,
and sweep/verification drivers plus serialization in
:mod:`uncrel.harness`.  The ``uncrel`` command wraps the drivers.
"""
from ._version import __version__
from .core import (
    DensityMatrix,
    Observable,
    PureState,
    QuantumState,
    commutator_expectation,
    deviation_state,
    expectation,
    orthogonal_qubit,
    random_observable,
    random_pure_state,
    variance,
)
from .errors import (
    ConsistencyError,
    ContractError,
    DimensionError,
    InvalidMomentsError,
    OrthogonalityError,
    UnsupportedCountError,
    UnsupportedDimensionError,
    UnsupportedRelationError,
    UnsupportedStateError,
)
from .harness import (
    OutputRow,
    SweepSpec,
    VerificationSummary,
    emit,
    run_sweep,
    run_verify,
)
from .qubit import (
    BlochAngles,
    QubitMoments,
    StokesVector,
    bloch_to_state,
    closed_form_bounds,
    closed_form_lhs,
    closed_form_rhs,
    density_to_stokes,
    moments_from_angles,
    moments_from_expectations,
    moments_from_stokes,
    pauli,
    pauli_triple,
    stokes_to_density,
)
from .relations import (
    BoundReport,
    ObservableSet,
    PAIRWISE_RELATIONS,
    Relation,
    SUM_FORM_RELATIONS,
    SkippedRelation,
    chen_fei,
    evaluate_all,
    maccone_pati_deviation,
    maccone_pati_orthogonal,
    robertson,
    song,
    sum_minus,
    sum_plus,
    triple_commutator,
    triple_pairwise,
    triple_sum,
)
from .shots import (
    EstimateWithError,
    MeasurementRecord,
    ShotPlan,
    bootstrap_bounds,
    derive_seed,
    estimate_expectation,
    simulate_counts,
)

__all__ = [
    "__version__",
    "BlochAngles",
    "BoundReport",
    "ConsistencyError",
    "ContractError",
    "DensityMatrix",
    "DimensionError",
    "EstimateWithError",
    "InvalidMomentsError",
    "MeasurementRecord",
    "Observable",
    "ObservableSet",
    "OrthogonalityError",
    "OutputRow",
    "PAIRWISE_RELATIONS",
    "PureState",
    "QuantumState",
    "QubitMoments",
    "Relation",
    "SUM_FORM_RELATIONS",
    "ShotPlan",
    "SkippedRelation",
    "StokesVector",
    "SweepSpec",
    "UnsupportedCountError",
    "UnsupportedDimensionError",
    "UnsupportedRelationError",
    "UnsupportedStateError",
    "VerificationSummary",
    "bloch_to_state",
    "bootstrap_bounds",
    "chen_fei",
    "closed_form_bounds",
    "closed_form_lhs",
    "closed_form_rhs",
    "commutator_expectation",
    "density_to_stokes",
    "derive_seed",
    "deviation_state",
    "emit",
    "estimate_expectation",
    "evaluate_all",
    "expectation",
    "maccone_pati_deviation",
    "maccone_pati_orthogonal",
    "moments_from_angles",
    "moments_from_expectations",
    "moments_from_stokes",
    "orthogonal_qubit",
    "pauli",
    "pauli_triple",
    "random_observable",
    "random_pure_state",
    "robertson",
    "run_sweep",
    "run_verify",
    "simulate_counts",
    "song",
    "stokes_to_density",
    "sum_minus",
    "sum_plus",
    "triple_commutator",
    "triple_pairwise",
    "triple_sum",
    "variance",
]
