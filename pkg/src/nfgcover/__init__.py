"""Partition sums of normal factor graphs and their finite covers.

Exact brute-force partition sums, M-cover construction and averages,
the merged-double-cover construction with its pair-alphabet transform,
sum-product/Bethe values, and seeded verification drivers for the
identities and inequalities tying them together.
"""

from .bp import (
    BetheResult,
    BpState,
    RatioReport,
    bethe_partition_sum,
    ratio_report,
    run_sum_product,
)
from .covers import (
    BetheMEstimate,
    CoverSpec,
    RuozziReport,
    bethe_m,
    build_cover,
    check_ruozzi,
    cover_mask,
    double_cover_from_mask,
    enumerate_double_covers,
    sample_cover,
    trivial_cover,
)
from .errors import NfgError
from .generators import GeneratorSpec, draw_lsm_degree3, gen_instance
from .graph import (
    Edge,
    Factor,
    Nfg,
    det_of,
    equality_tensor,
    global_function,
    is_log_submodular,
    is_log_supermodular,
    make_nfg,
    matrix_of,
    perm_of,
    validate,
)
from .holo import (
    PAIR_TRANSFORM,
    Degree3PrintReport,
    SignStructureReport,
    bethe2_via_transform,
    check_nonnegative_transform,
    check_sign_structure,
    closed_form_degree2,
    closed_form_degree3,
    closed_form_equality,
    conditional_matrix,
    degree3_printed_cells,
    edge_gate,
    pair_products,
    transform_mdc,
    transform_tensor,
    transformed_pair_graph,
    verify_degree3_printed,
)
from .io import load_cover, load_nfg, save_cover, save_nfg
from .kernels import backend as kernel_backend
from .mdc import ConstructionMap, build_averaged_mdc, build_mdc, pair_merge
from .partition import DEFAULT_ENUMERATION_CAP, global_values, partition_sum

__version__ = "0.1.0"

__all__ = [
    "BetheMEstimate",
    "BetheResult",
    "BpState",
    "ConstructionMap",
    "CoverSpec",
    "DEFAULT_ENUMERATION_CAP",
    "Degree3PrintReport",
    "Edge",
    "Factor",
    "GeneratorSpec",
    "Nfg",
    "NfgError",
    "PAIR_TRANSFORM",
    "RatioReport",
    "RuozziReport",
    "SignStructureReport",
    "bethe2_via_transform",
    "bethe_m",
    "bethe_partition_sum",
    "build_averaged_mdc",
    "build_cover",
    "build_mdc",
    "check_nonnegative_transform",
    "check_ruozzi",
    "check_sign_structure",
    "closed_form_degree2",
    "closed_form_degree3",
    "closed_form_equality",
    "conditional_matrix",
    "cover_mask",
    "degree3_printed_cells",
    "det_of",
    "double_cover_from_mask",
    "draw_lsm_degree3",
    "edge_gate",
    "enumerate_double_covers",
    "equality_tensor",
    "gen_instance",
    "global_function",
    "global_values",
    "is_log_submodular",
    "is_log_supermodular",
    "kernel_backend",
    "load_cover",
    "load_nfg",
    "make_nfg",
    "matrix_of",
    "pair_merge",
    "pair_products",
    "partition_sum",
    "perm_of",
    "ratio_report",
    "run_sum_product",
    "sample_cover",
    "save_cover",
    "save_nfg",
    "transform_mdc",
    "transform_tensor",
    "transformed_pair_graph",
    "trivial_cover",
    "validate",
    "verify_degree3_printed",
]
