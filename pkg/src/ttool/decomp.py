"""Factorizations of F-square tensors: QR, LU, polar, Schur, and the
positive-definiteness classification.

Each factorization runs per Fourier block and folds the factors back;
triangular/diagonal structure in the Fourier domain is equivalent to the
same structure on every frontal slice, so the structural predicates hold
in the spatial domain too.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .algebra import _fft_slices, structure_predicates
from .core import Tensor3
from .defaults import TOL_PRED, TOL_RANK
from .errors import ConvergenceError, NotHermitianError, PivotError, ShapeError


def _require_f_square(a: Tensor3, op: str):
    if not a.is_f_square():
        raise ShapeError(f"{op} requires an F-square tensor, got {a.shape}")


def t_qr(a: Tensor3) -> tuple[Tensor3, Tensor3]:
    """QR factorization a = q * r with q unitary and r F-upper-triangular.

    Per-block R diagonals are normalized to be real and nonnegative so
    the output is deterministic.
    """
    _require_f_square(a, "t_qr")
    fa = _fft_slices(a)
    p, n = fa.shape[0], fa.shape[1]
    qb = np.empty_like(fa)
    rb = np.empty_like(fa)
    for i in range(p):
        q, r = np.linalg.qr(fa[i])
        d = np.diag(r)
        phase = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
        qb[i] = q * phase[np.newaxis, :]
        rb[i] = phase.conj()[:, np.newaxis] * r
    return Tensor3(np.fft.ifft(qb, axis=0)), Tensor3(np.fft.ifft(rb, axis=0))


def _lu_nopivot(mat: np.ndarray, block: int) -> tuple[np.ndarray, np.ndarray]:
    # Doolittle elimination; pivots checked against the initial magnitude
    # scale because a zero leading minor makes unpivoted LU impossible.
    n = mat.shape[0]
    u = mat.astype(np.complex128, copy=True)
    low = np.eye(n, dtype=np.complex128)
    scale = float(np.max(np.abs(mat))) if mat.size else 0.0
    for k in range(n - 1):
        piv = u[k, k]
        if abs(piv) <= TOL_RANK * scale:
            raise PivotError(
                f"zero pivot at elimination step {k + 1} of Fourier block "
                f"{block + 1}; a leading minor is singular",
                block_index=block + 1,
                step=k + 1,
            )
        low[k + 1:, k] = u[k + 1:, k] / piv
        u[k + 1:, k:] -= np.outer(low[k + 1:, k], u[k, k:])
        u[k + 1:, k] = 0.0
    return low, u


def t_lu(a: Tensor3, pivot: bool = True) -> tuple[Tensor3 | None, Tensor3, Tensor3]:
    """LU factorization.

    With pivot=True returns (perm, l, u) with perm * a = l * u and perm
    a per-block permutation tensor; with pivot=False returns
    (None, l, u) with a = l * u, raising PivotError when some Fourier
    block has a singular leading minor.  l is F-lower with unit diagonal
    tubes, u is F-upper.
    """
    _require_f_square(a, "t_lu")
    fa = _fft_slices(a)
    p = fa.shape[0]
    lb = np.empty_like(fa)
    ub = np.empty_like(fa)
    if not pivot:
        for i in range(p):
            lb[i], ub[i] = _lu_nopivot(fa[i], i)
        return None, Tensor3(np.fft.ifft(lb, axis=0)), Tensor3(np.fft.ifft(ub, axis=0))
    pb = np.empty_like(fa)
    for i in range(p):
        pm, low, up = scipy.linalg.lu(fa[i])
        # scipy returns fa[i] = pm @ low @ up, so pm.T @ fa[i] = low @ up
        pb[i] = pm.T
        lb[i] = low
        ub[i] = up
    return (
        Tensor3(np.fft.ifft(pb, axis=0)),
        Tensor3(np.fft.ifft(lb, axis=0)),
        Tensor3(np.fft.ifft(ub, axis=0)),
    )


def t_polar(a: Tensor3) -> tuple[Tensor3, Tensor3]:
    """Right polar factorization a = u * h with u unitary and h
    Hermitian positive semidefinite.

    For singular input h is semidefinite and u is the (non-unique)
    factor fixed by the singular value decomposition convention.
    """
    _require_f_square(a, "t_polar")
    fa = _fft_slices(a)
    ub = np.empty_like(fa)
    hb = np.empty_like(fa)
    for i in range(fa.shape[0]):
        w, s, vh = np.linalg.svd(fa[i])
        ub[i] = w @ vh
        hb[i] = vh.conj().T @ (s[:, np.newaxis] * vh)
    return Tensor3(np.fft.ifft(ub, axis=0)), Tensor3(np.fft.ifft(hb, axis=0))


def is_t_positive_definite(a: Tensor3, tol: float | None = None) -> str:
    """Classify a Hermitian tensor as 'definite', 'semidefinite' or
    'indefinite' by the smallest Fourier-block eigenvalue.

    Raises NotHermitianError for non-Hermitian input.
    """
    _require_f_square(a, "is_t_positive_definite")
    if tol is None:
        tol = TOL_PRED
    if not structure_predicates(a, "hermitian"):
        raise NotHermitianError("positive definiteness is defined for Hermitian tensors only")
    fa = _fft_slices(a)
    herm = 0.5 * (fa + fa.conj().transpose(0, 2, 1))
    eigs = np.linalg.eigvalsh(herm)
    span = float(np.max(np.abs(eigs))) if eigs.size else 0.0
    thr = tol * max(1.0, span)
    low = float(np.min(eigs))
    if low > thr:
        return "definite"
    if low >= -thr:
        return "semidefinite"
    return "indefinite"


def t_schur(a: Tensor3) -> tuple[Tensor3, Tensor3]:
    """Schur factorization a = qᴴ * t * q with q unitary, t F-upper.

    Diagonal tubes of t carry the T-eigenvalues slice by slice.
    """
    _require_f_square(a, "t_schur")
    fa = _fft_slices(a)
    qb = np.empty_like(fa)
    tb = np.empty_like(fa)
    for i in range(fa.shape[0]):
        try:
            t, z = scipy.linalg.schur(fa[i], output="complex")
        except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
            raise ConvergenceError(
                f"Schur iteration failed on Fourier block {i + 1}: {exc}"
            ) from exc
        tb[i] = t
        qb[i] = z.conj().T
    return Tensor3(np.fft.ifft(qb, axis=0)), Tensor3(np.fft.ifft(tb, axis=0))
