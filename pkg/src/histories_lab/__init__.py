"""Consistent-histories probability calculus and unifying-probability search.

Build class operators from time-ordered projective decompositions, compute
decoherence functionals and (quasi-)probabilities with optional
post-selection, classify history sets on the classicality hierarchy, detect
zero covers, and decide by LP feasibility whether incompatible consistent
sets admit one unifying probability, with Bell/CHSH inequalities as analytic
cross-checks.
"""

from ._kernels import NUMBA_AVAILABLE, active_backend
from .analysis import AnalysisOptions, analyze, report_to_json, reverify
from .classicality import (
    ClassicalityReport,
    ZeroCoverReport,
    classify,
    detect_zero_cover,
)
from .config import parse_config, scenario_to_config
from .errors import (
    ConfigValidationError,
    DegeneratePostSelectionError,
    DimensionLimitError,
    HistoriesLabError,
    HistoryCountError,
    InconsistentSetError,
    NumericError,
    ValidationError,
)
from .histories import (
    ClassOperator,
    DecoherenceFunctional,
    HistorySchedule,
    HistorySet,
    Slot,
    build_class_operators,
    coarse_grain,
    coarse_measure,
    decoherence_functional,
    history_probabilities,
    history_probability,
    history_set,
    negate,
    negation_interference,
    quasi_probabilities,
    quasi_probability,
)
from .operators import (
    DensityOperator,
    HamiltonianEvolution,
    Projector,
    bloch_projector,
    heisenberg_projector,
    ket,
    mats_close,
    projector_onto,
    propagator,
    tensor_product,
    validate_projective_decomposition,
)
from .scenarios import (
    ScenarioDescriptor,
    ScenarioSet,
    build_scenario,
    eprb,
    eprb_planar,
    griffiths_spin,
    leggett_garg,
    three_box,
)
from .simplex import LPResult, solve_lp, solve_lp_exact, solve_lp_float, verify_certificate
from .unify import (
    CorrelationSet,
    FeasibilityVerdict,
    JointSampleSpace,
    MarginalTable,
    QuasiClassification,
    Variable,
    VariableMapping,
    bell_check,
    build_constraint_system,
    chsh_check,
    classify_quasiprobability,
    correlations_from_marginals,
    extract_marginals,
    find_unifying_probability,
    pair_correlation,
    probe_uniqueness,
    product_unify,
    verify_witness,
)

__version__ = "0.1.0"
