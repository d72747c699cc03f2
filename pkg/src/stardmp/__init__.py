"""Generalized inverses of dense complex matrices and *-DMP decisions."""

from .additive import (
    PierceDecomposition,
    TheoremVerdict,
    b_m_recurrence,
    b_m_sum,
    commutator,
    cor24_verify,
    cor34_verify,
    drazin_add_commuting,
    lemma21_verify,
    lemma22_check,
    lemma31_verify,
    pierce,
    thm23_verify,
    thm32_verify,
    thm33_verify,
    triangular_drazin,
)
from .blockmat import (
    BlockMatrix,
    assemble,
    cor43_check,
    cor45_check,
    cor47_check,
    lemma41_check,
    swap_conjugate,
    thm42_check,
    thm44_check,
    thm46_check,
)
from .geninv import (
    DrazinResult,
    InverseCertificate,
    InverseKind,
    NoCoreInverse,
    NoGroupInverse,
    StarDMPReport,
    adjoint_pseudo_core_agrees,
    core_inverse,
    drazin,
    group_inverse,
    index,
    is_EP,
    is_projection,
    is_star_dmp,
    moore_penrose,
    pseudo_core,
)
from .matcore import (
    DEFAULT_TOL,
    MatrixFormatError,
    NumericalFailure,
    ShapeError,
    Singular,
    StarDMPError,
    Tolerance,
    approx_eq,
    from_json,
    rank,
    to_json,
)
from .registry import THEOREM_IDS, check

__version__ = "0.1.0"
