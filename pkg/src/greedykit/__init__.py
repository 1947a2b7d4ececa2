"""Greedy-type basis constants on finite-dimensional sequence spaces.

The package measures how well the thresholding greedy algorithm behaves
on a concrete space: run traces, estimate the classical constants by
exhaustive or sampled grid search, and check the inequality lattice that
ties them together.
"""

from .catalog import (
    SpaceSpec,
    catalog_entries,
    direct_sum_spec,
    interleave_classes,
    lindenstrauss_norm,
    load_weights_file,
    make_space,
    space_from_dict,
)
from .constants import (
    ConstantEstimate,
    ConstantKind,
    NormAxiomError,
    estimate_constant,
    estimate_constants,
    instance_ratio,
    kind_label,
    prefix_error_min,
    projection_error_min,
    reference_estimate,
)
from .core import (
    Space,
    SpaceCheck,
    SpaceValidation,
    as_vector,
    coeff_sup,
    index_set,
    indicator,
    partial_sum,
    project,
    sign_pattern,
    support,
    validate_space,
)
from .greedy import (
    GreedyTrace,
    TraceStep,
    greedy_sets,
    greedy_sum,
    is_greedy_set,
    tga_run,
    truncate,
)
from .instances import (
    ALL_KINDS,
    CapExceededError,
    Instance,
    SearchConfig,
    count_instances,
    enumerate_instances,
    instance_is_valid,
    sample_instances,
)
from .theorems import (
    CheckResult,
    GROWTH_FAMILIES,
    THEOREM_IDS,
    VerificationReport,
    growth_curve,
    verify,
    verify_all,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_KINDS",
    "CapExceededError",
    "CheckResult",
    "ConstantEstimate",
    "ConstantKind",
    "GROWTH_FAMILIES",
    "GreedyTrace",
    "Instance",
    "NormAxiomError",
    "SearchConfig",
    "Space",
    "SpaceCheck",
    "SpaceSpec",
    "SpaceValidation",
    "THEOREM_IDS",
    "TraceStep",
    "VerificationReport",
    "as_vector",
    "catalog_entries",
    "coeff_sup",
    "count_instances",
    "direct_sum_spec",
    "enumerate_instances",
    "estimate_constant",
    "estimate_constants",
    "greedy_sets",
    "greedy_sum",
    "growth_curve",
    "index_set",
    "indicator",
    "instance_is_valid",
    "instance_ratio",
    "interleave_classes",
    "is_greedy_set",
    "kind_label",
    "lindenstrauss_norm",
    "load_weights_file",
    "make_space",
    "partial_sum",
    "prefix_error_min",
    "project",
    "projection_error_min",
    "reference_estimate",
    "sample_instances",
    "sign_pattern",
    "space_from_dict",
    "support",
    "tga_run",
    "truncate",
    "validate_space",
    "verify",
    "verify_all",
]
