"""Brute-force reference implementations on the dense embedding.

Everything here works directly on ``bcirc(a)`` with no FFT and no
per-frequency loop, so results are independent of the fast paths and
serve as ground truth in tests.  Sizes are capped at 64 per dimension;
these routines are O((np)^3) and exist for verification, not speed.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .core import Tensor3, bcirc, bcirc_inv, fold, unfold
from .defaults import TOL_RANK
from .errors import ShapeError

# hard cap on each dimension (rows, cols, slices)
SIZE_CAP = 64


def _check_cap(*tensors: Tensor3):
    for t in tensors:
        if max(t.shape) > SIZE_CAP:
            raise ShapeError(
                f"oracle size cap is {SIZE_CAP} per dimension, got {t.shape}"
            )


def dense_tprod(a: Tensor3, b: Tensor3) -> Tensor3:
    """Literal t-product: fold(bcirc(a) @ unfold(b))."""
    _check_cap(a, b)
    if a.n_slices != b.n_slices:
        raise ShapeError(f"slice counts differ: {a.n_slices} vs {b.n_slices}")
    if a.n_cols != b.n_rows:
        raise ShapeError(f"inner dimensions differ: {a.shape} * {b.shape}")
    return fold(bcirc(a) @ unfold(b), a.n_slices)


def dense_tfunc(a: Tensor3, f) -> Tensor3:
    """Literal tensor function: fold of the first block column of f(bcirc(a)).

    ``f`` is a dense matrix-function evaluator (ndarray -> ndarray)
    applied once to the whole (np, np) embedding.
    """
    _check_cap(a)
    if not a.is_f_square():
        raise ShapeError(f"dense_tfunc requires an F-square tensor, got {a.shape}")
    n, p = a.n_rows, a.n_slices
    big = f(bcirc(a))
    big = np.asarray(big, dtype=np.complex128)
    if big.shape != (n * p, n * p):
        raise ShapeError(f"evaluator returned shape {big.shape}, expected {(n * p, n * p)}")
    return fold(big[:, :n], p)


def _qr_rank_factor(mat: np.ndarray, tol: float, floor: float = 0.0):
    """Full-rank factorization mat = B @ C via column-pivoted QR.

    Returns (B, C, rank); rank 0 yields (None, None, 0).  ``floor`` is an
    absolute pivot cutoff so iterates that have collapsed to rounding dust
    of an outer scale are not mistaken for full-rank matrices.
    """
    q, r, piv = scipy.linalg.qr(mat, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] <= 0.0:
        return None, None, 0
    rank = int(np.count_nonzero(diag > max(tol * diag[0], floor)))
    if rank == 0:
        return None, None, 0
    b = q[:, :rank]
    c = np.zeros((rank, mat.shape[1]), dtype=np.complex128)
    c[:, piv] = r[:rank, :]
    return b, c, rank


def dense_drazin(a: Tensor3, tol: float | None = None) -> Tensor3:
    """Drazin inverse computed on bcirc(a) by rank factorization.

    Iterates full-rank factorizations (Cline's method): A = B1 C1,
    C1 B1 = B2 C2, ... until C_k B_k is nonsingular or zero, then

        A^D = B1...Bk (C_k B_k)^-(k+1) C_k...C1.

    The result is folded back through ``bcirc_inv``; a StructureError
    there signals a bug, since the Drazin inverse of a block-circulant
    matrix is block-circulant.
    """
    _check_cap(a)
    if not a.is_f_square():
        raise ShapeError(f"dense_drazin requires an F-square tensor, got {a.shape}")
    if tol is None:
        tol = TOL_RANK
    n, p = a.n_rows, a.n_slices
    big = bcirc(a)
    size = n * p

    floor = tol * float(np.linalg.norm(big, 2))
    b, c, rank = _qr_rank_factor(big, tol)
    if rank == 0:
        drazin = np.zeros((size, size), dtype=np.complex128)
    else:
        b_prod, c_prod = b, c
        s = c @ b
        k = 1
        while True:
            b, c, rank = _qr_rank_factor(s, tol, floor)
            if rank == 0:
                drazin = np.zeros((size, size), dtype=np.complex128)
                break
            if rank == s.shape[0]:
                core = np.linalg.matrix_power(np.linalg.inv(s), k + 1)
                drazin = b_prod @ core @ c_prod
                break
            b_prod = b_prod @ b
            c_prod = c @ c_prod
            s = c @ b
            k += 1
            if k > size:  # cannot happen for consistent ranks
                raise RuntimeError("rank factorization failed to terminate")

    # structure tolerance looser than the default: k+1 chained inversions
    # legitimately smear the circulant symmetry at the 1e-10 level
    scale = max(1.0, float(np.max(np.abs(drazin))))
    return bcirc_inv(drazin, n, n, p, tol=1e-9 * scale)
