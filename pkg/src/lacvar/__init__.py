"""Numerical toolkit for variation operators of sliding averages over
lacunary scale sequences: operator evaluation, Fourier multiplier sums,
kernel difference bounds, weighted norms, and end-to-end inequality
verification scenarios with deterministic reports.
"""

from .lacunary import (
    LacunarySeq,
    NonPositiveScale,
    NotIncreasing,
    RatioBelowBeta,
    RefinedSeq,
    SequenceError,
    gamma,
    parse_sequence,
    refine,
    validate_lacunary,
)
from .gridfn import (
    Atom,
    BadParams,
    EmptyFamily,
    GridFunction,
    GridMismatch,
    Interval,
    IntervalTooSmall,
    UniformGrid,
    average_over,
    bmo_norm,
    lp_norm,
    make_atom,
    make_dyadic_family,
    make_family,
    read_function_csv,
    sup_norm,
    superlevel_measure,
    write_function_csv,
)
from .avgops import (
    NonPositiveWindow,
    TailTooLarge,
    VariationSpec,
    average_fast,
    average_oracle,
    averages_at,
    default_eval_grid,
    oracle_averages_at,
    scale_stack,
    scale_stack_at,
    tail_bound,
    variation,
    variation_at,
    vector_variation,
)
from .fourier import (
    BoundViolation,
    EmptyGrid,
    F_eval,
    default_xi_grid,
    fprime,
    fprime_check,
    multiplier_sums,
    parse_xi_grid,
    phi_hat,
    sup_scan,
)
from .kernel import (
    IdentityViolated,
    KernelSpec,
    PreconditionViolated,
    drlem_check,
    gap_condition_violations,
    hormander_integral,
    indicator_identity,
    kernel_diff_norm,
    kernel_norm,
    shell_integrals,
)
from .weights import (
    NonPositiveWeight,
    Weight,
    WeightSpec,
    a1_constant,
    ap_constant,
    constant_weight,
    parse_weight,
    power_weight,
)
from .harness import (
    DEFAULT_THRESHOLDS,
    SCENARIO_KINDS,
    CaseResult,
    Check,
    Scenario,
    ScenarioInvalid,
    VerificationReport,
    default_scenario,
    emit_report,
    from_config,
    run_scenario,
    weak_sup,
)

__version__ = "0.1.0"

__all__ = [
    "LacunarySeq",
    "RefinedSeq",
    "SequenceError",
    "NonPositiveScale",
    "NotIncreasing",
    "RatioBelowBeta",
    "gamma",
    "parse_sequence",
    "refine",
    "validate_lacunary",
    "UniformGrid",
    "GridFunction",
    "GridMismatch",
    "EmptyFamily",
    "IntervalTooSmall",
    "BadParams",
    "Interval",
    "Atom",
    "average_over",
    "bmo_norm",
    "lp_norm",
    "sup_norm",
    "superlevel_measure",
    "make_atom",
    "make_dyadic_family",
    "make_family",
    "read_function_csv",
    "write_function_csv",
    "VariationSpec",
    "TailTooLarge",
    "NonPositiveWindow",
    "averages_at",
    "oracle_averages_at",
    "average_fast",
    "average_oracle",
    "scale_stack",
    "scale_stack_at",
    "tail_bound",
    "default_eval_grid",
    "variation",
    "variation_at",
    "vector_variation",
    "F_eval",
    "fprime",
    "fprime_check",
    "phi_hat",
    "multiplier_sums",
    "sup_scan",
    "default_xi_grid",
    "parse_xi_grid",
    "EmptyGrid",
    "BoundViolation",
    "KernelSpec",
    "PreconditionViolated",
    "IdentityViolated",
    "kernel_norm",
    "kernel_diff_norm",
    "shell_integrals",
    "hormander_integral",
    "drlem_check",
    "indicator_identity",
    "gap_condition_violations",
    "Weight",
    "WeightSpec",
    "NonPositiveWeight",
    "ap_constant",
    "a1_constant",
    "power_weight",
    "constant_weight",
    "parse_weight",
    "Scenario",
    "ScenarioInvalid",
    "CaseResult",
    "Check",
    "VerificationReport",
    "SCENARIO_KINDS",
    "DEFAULT_THRESHOLDS",
    "default_scenario",
    "from_config",
    "run_scenario",
    "emit_report",
    "weak_sup",
]
