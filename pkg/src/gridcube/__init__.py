"""Embeddings of k-dimensional grids into their optimal hypercubes.

The package builds, stage by stage, an embedding of an arbitrary grid
[a_1 x ... x a_k] into the hypercube of dimension ceil(log2 |G|), together
with every intermediate object (circulant column-count matrix, consistent
roundings, blank-level designation matrices, the inflation/stacking pipeline,
and cyclic caterpillar labelings of the coordinate blocks), plus a
verification suite that checks the construction's structural guarantees on
concrete instances.
"""
from .base2d import CirculantR, Embedding2D, build_R, build_f2, fill_columns
from .caterpillars import (
    Caterpillar,
    CubeLabeling,
    SearchExhausted,
    best_labeling,
    caterpillar_for,
    double_caterpillar,
    gray_label,
    label_from_caterpillar,
    search_caterpillar,
    verify_window,
)
from .checks import (
    CheckResult,
    CoordinateDiffs,
    DilationReport,
    HypercubeEmbedding,
    assemble_Hk,
    audit_file,
    audit_grid,
    brute_force_dilation,
    chain_battery,
    coordinate_diffs,
    diff_case_checks,
    dilation,
    dump_embedding,
    parse_embedding,
    pipeline_battery,
    render_report,
)
from .grids import (
    GridSpec,
    GridVertex,
    LevelAddress,
    compute_exponents,
    kappa,
    level_budget,
    page_index,
)
from .rounding import (
    BinaryMatrix,
    RealSequence,
    RoundingSpec,
    balance_violations,
    build_FX,
    matrix_rounding_violations,
    round_matrix,
    two_way_round,
    window_violations,
)
from .stages import (
    BlankPlan,
    StageEmbedding,
    build_blank_plan,
    build_fk,
    full_stack_heights,
    s_sequence,
    stack_heights,
)

__all__ = [
    "BinaryMatrix",
    "BlankPlan",
    "Caterpillar",
    "CheckResult",
    "CirculantR",
    "CoordinateDiffs",
    "CubeLabeling",
    "DilationReport",
    "Embedding2D",
    "GridSpec",
    "GridVertex",
    "HypercubeEmbedding",
    "LevelAddress",
    "RealSequence",
    "RoundingSpec",
    "SearchExhausted",
    "StageEmbedding",
    "assemble_Hk",
    "audit_file",
    "audit_grid",
    "balance_violations",
    "best_labeling",
    "brute_force_dilation",
    "build_FX",
    "build_R",
    "build_blank_plan",
    "build_f2",
    "build_fk",
    "caterpillar_for",
    "chain_battery",
    "compute_exponents",
    "coordinate_diffs",
    "diff_case_checks",
    "dilation",
    "double_caterpillar",
    "dump_embedding",
    "fill_columns",
    "full_stack_heights",
    "gray_label",
    "kappa",
    "label_from_caterpillar",
    "level_budget",
    "matrix_rounding_violations",
    "page_index",
    "parse_embedding",
    "pipeline_battery",
    "render_report",
    "round_matrix",
    "s_sequence",
    "search_caterpillar",
    "stack_heights",
    "two_way_round",
    "verify_window",
    "window_violations",
]
