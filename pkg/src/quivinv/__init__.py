"""Exact-arithmetic invariants of mixed quiver settings.

Mixed quiver settings attach a classical group (GL, O, Sp, SL, SO) to every
vertex of a quiver and a matrix subspace (unconstrained, symmetric, skew, or
J-twisted) to every arrow, with a vertex involution pairing dual spaces.
This package models those settings, computes the pfaffian-based invariants
living on them (characteristic coefficients of path products, block
pfaffians of tableaux with substitutions), enumerates the bounded generating
families, and verifies all claimed invariance properties by randomized exact
evaluation over the rationals and over prime fields.
"""

from .field import Mat, Mod, PrimeField, RATIONALS, field_from_spec
from .generators import (
    BudgetError,
    GeneratorDescriptor,
    bpf_generators,
    matrix_invariant_generators,
    multidegree,
    one_vertex_setting,
    sigma_generators,
)
from .pfaffian import BlockLayout, block_linearization, gen_pf, partial_linearization, pf
from .poly import (
    Polynomial,
    PolyMatrix,
    aux_var,
    det,
    entry_var,
    generic_matrix,
    parse_polynomial,
    sigma,
    substitute,
    trace,
)
from .quiver import (
    Arrow,
    DerivedSetting,
    Quiver,
    Setting,
    SettingError,
    closed_paths,
    double_setting,
    loop_setting,
    normalize_setting,
    path_matrix,
    paths_between,
    reduce_setting,
    setting_from_json,
    setting_to_json,
    validate,
)
from .tableau import (
    Tableau,
    TabArrow,
    TableauError,
    block_embedding_sign,
    bordered_pfaffian_tableau,
    bpf,
    bpf0,
    determinant_tableau,
    distribution_lookup,
    expand_weight,
    fiber_factorial,
    is_path_tableau,
    pfaffian_tableau,
)
from .verify import (
    GroupElement,
    RepresentationPoint,
    Report,
    act,
    check_invariance,
    check_reduction_invariance,
    check_semi_invariance,
    point_assignment,
    sample_group_element,
    sample_path_tableau,
    sample_point,
    sample_setting,
)

__version__ = "0.1.0"
