"""edgebit: knob-parameterized quantum models and a metastable 1-bit recorder.

The package has two halves.  The model-framework half (linalg, models,
constraints, synthesis) treats experimental records as relative-frequency
tables and asks which density-operator/resolution pairs can reproduce them:
it can synthesize an exactly-factoring model from any table, and check the
overlap and separation bounds any factoring model must obey.  The recorder
half (flipflop, grid, fitting) is a worked quantum model of a bistable
1-bit device caught on edge: the closed-form disagreement probability, an
independent split-step PDE solver validating it, and parameter fitting
against measured disagreement records.
"""
from .constraints import (
    BoundReport,
    FactorizationError,
    check_overlap_constraint,
    check_separation_constraint,
    overlap_upper_bound,
    resolution_separation_lower_bound,
)
from .fitting import FitConfig, FitResult, fit, load_record_csv
from .flipflop import (
    DisagreementCurve,
    FlipflopParams,
    classical_disagreement,
    disagreement_probability,
    joint_density,
    quadrant_disagreement_numeric,
    simulate_curve,
    to_dimensionless,
    to_physical,
)
from .grid import GridSpec, GridState, disagreement_from_grid, evolve, init_packet
from .linalg import (
    ContractViolation,
    hermitian_eigendecomposition,
    hermitian_sqrt,
    operator_norm,
    trace_product,
    validate_density,
    validate_resolution,
)
from .models import (
    KnobModel,
    KnobSpace,
    RelFreqTable,
    TrialRecord,
    is_restriction,
    model_distance,
    overlap,
    probability,
    relfreq_from_trials,
    statistical_distance,
)
from .synthesis import (
    SynthesizedModel,
    generate_inequivalent_model,
    householder_basis,
    synthesize_model,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ContractViolation",
    "DisagreementCurve",
    "FactorizationError",
    "FitConfig",
    "FitResult",
    "FlipflopParams",
    "GridSpec",
    "GridState",
    "KnobModel",
    "KnobSpace",
    "RelFreqTable",
    "SynthesizedModel",
    "TrialRecord",
    "check_overlap_constraint",
    "check_separation_constraint",
    "classical_disagreement",
    "disagreement_from_grid",
    "disagreement_probability",
    "evolve",
    "fit",
    "generate_inequivalent_model",
    "hermitian_eigendecomposition",
    "hermitian_sqrt",
    "householder_basis",
    "init_packet",
    "is_restriction",
    "joint_density",
    "load_record_csv",
    "model_distance",
    "operator_norm",
    "overlap",
    "overlap_upper_bound",
    "probability",
    "quadrant_disagreement_numeric",
    "relfreq_from_trials",
    "resolution_separation_lower_bound",
    "simulate_curve",
    "statistical_distance",
    "synthesize_model",
    "to_dimensionless",
    "to_physical",
    "trace_product",
    "validate_density",
    "validate_resolution",
]
