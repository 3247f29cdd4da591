"""Tensor t-product toolbox.

Third-order complex tensors under the t-product: algebra, Fourier-block
transforms, Jordan canonical form, tensor functions and power series,
characteristic/minimal polynomials, factorizations (QR/LU/polar/Schur),
and generalized inverses (Moore-Penrose, group, Drazin) with their
limit formulas.  Dense block-circulant oracles live in ttool.oracle.
"""

from .algebra import (
    commutator,
    structure_predicates,
    tinv,
    tpoly_eval,
    tpow,
    tprod,
)
from .core import (
    Tensor3,
    bcirc,
    bcirc_inv,
    conj_transpose,
    fold,
    fro_norm,
    identity_tensor,
    load_tensor,
    save_tensor,
    unfold,
)
from .decomp import is_t_positive_definite, t_lu, t_polar, t_qr, t_schur
from .errors import (
    ConvergenceError,
    DomainError,
    IllConditionedError,
    NotCommutingError,
    NotDiagonalizableError,
    NotHermitianError,
    PivotError,
    RadiusError,
    ShapeError,
    SingularError,
    StructureError,
    TensorError,
    TIndexError,
)
from .ginv import (
    CoreNilpotent,
    GinvReport,
    NilpotentLimit,
    core_nilpotent,
    drazin_limit,
    drazin_via_formula,
    is_range_hermitian,
    nilpotent_limit,
    t_drazin,
    t_group_inverse,
    t_index,
    t_moore_penrose,
    t_rank,
)
from .polyn import RootMultiset, poly_residual, t_char_poly, t_min_poly
from .spectral import (
    TEigenvalues,
    TJordan,
    is_f_diagonalizable,
    jordan_factorize,
    jordan_synthesize,
    nilpotency,
    simultaneous_diagonalize,
    t_eigenvalues,
)
from .tfunc import (
    SeriesResult,
    alpha_root,
    named_tfunc,
    series_coefficients,
    series_eval,
    tfunc_apply,
)
from .transform import FourierBlocks, from_blocks, phase_combine, to_blocks, unitary_dft

__version__ = "0.1.0"

__all__ = [
    "Tensor3",
    "FourierBlocks",
    "TEigenvalues",
    "TJordan",
    "RootMultiset",
    "SeriesResult",
    "GinvReport",
    "CoreNilpotent",
    "NilpotentLimit",
    "bcirc",
    "bcirc_inv",
    "unfold",
    "fold",
    "identity_tensor",
    "conj_transpose",
    "fro_norm",
    "save_tensor",
    "load_tensor",
    "to_blocks",
    "from_blocks",
    "phase_combine",
    "unitary_dft",
    "tprod",
    "tinv",
    "tpow",
    "tpoly_eval",
    "commutator",
    "structure_predicates",
    "t_eigenvalues",
    "jordan_factorize",
    "jordan_synthesize",
    "is_f_diagonalizable",
    "nilpotency",
    "simultaneous_diagonalize",
    "tfunc_apply",
    "named_tfunc",
    "series_eval",
    "series_coefficients",
    "alpha_root",
    "t_char_poly",
    "t_min_poly",
    "poly_residual",
    "t_qr",
    "t_lu",
    "t_polar",
    "t_schur",
    "is_t_positive_definite",
    "t_rank",
    "t_index",
    "t_moore_penrose",
    "t_group_inverse",
    "t_drazin",
    "drazin_via_formula",
    "is_range_hermitian",
    "core_nilpotent",
    "drazin_limit",
    "nilpotent_limit",
    "TensorError",
    "ShapeError",
    "StructureError",
    "SingularError",
    "PivotError",
    "RadiusError",
    "DomainError",
    "IllConditionedError",
    "NotHermitianError",
    "NotCommutingError",
    "NotDiagonalizableError",
    "ConvergenceError",
    "TIndexError",
]
