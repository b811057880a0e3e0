"""Embeddings of finite groups into wreath products, checked exhaustively."""

from .errors import (
    CoreNotTrivial,
    HypothesisFailed,
    KKError,
    MixedParents,
    NoValidCp,
    NotAGroup,
    NotNormal,
    NotPrimitive,
    NotTransversal,
    RankZero,
    SizeCap,
    UsageError,
    WindowViolation,
)
from .groups import (
    FiniteGroup,
    GroupMap,
    SubgroupHandle,
    Transversal,
    conjugate_subgroups,
    from_multiplication_table,
    from_permutations,
    internal_direct_product_check,
    normal_core,
    normalizer,
    parse_group_text,
    quotient_with_projection,
    subgroup_generated,
    transversal,
)
from .kk import KKContext, kk_full, kk_reduced, make_context, theorem1_check, theorem1_split, verify_prop1
from .wreath import WreathElement, WreathGroup, WreathMap, index_blowup_iso, lift_hom, wr_multiply, wr_shift

__version__ = "0.1.0"
