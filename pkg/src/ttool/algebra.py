"""T-product arithmetic: products, inverses, powers, polynomials.

All fast paths go through the Fourier domain: transform once, do
per-frequency dense matrix work, transform back.
"""

from __future__ import annotations

import math
import threading
from collections.abc import Sequence

import numpy as np

from .core import Tensor3, conj_transpose, fro_norm, identity_tensor
from .defaults import TOL_PRED, TOL_RANK
from .errors import ShapeError, SingularError

_SCRATCH_CAP = 1 << 25
_scratch = threading.local()


def _scratch_array(slot: str, shape, dtype):
    """Reusable per-thread work array, or None above the size cap.

    Returning None makes the numpy out= call sites fall back to a fresh
    allocation, so results are identical either way.
    """
    if math.prod(shape) * np.dtype(dtype).itemsize > _SCRATCH_CAP:
        return None
    store = getattr(_scratch, "store", None)
    if store is None:
        store = _scratch.store = {}
    arr = store.get(slot)
    if arr is None or arr.shape != tuple(shape) or arr.dtype != dtype:
        arr = np.empty(shape, dtype=dtype)
        store[slot] = arr
    return arr


def _fft_slices(a: Tensor3) -> np.ndarray:
    # private rectangular transform; public to_blocks is F-square only
    return np.fft.fft(a.data, axis=0)


def tprod(a: Tensor3, b: Tensor3) -> Tensor3:
    """T-product of an m x n x p tensor with an n x s x p tensor.

    Defined as fold(bcirc(a) @ unfold(b)); computed by per-frequency
    matrix products in the Fourier domain.  Real operands take a
    half-spectrum route: conjugate symmetry of the transform means only
    the first floor(p/2)+1 frequency blocks need multiplying.
    """
    if a.n_slices != b.n_slices:
        raise ShapeError(f"slice counts differ: {a.n_slices} vs {b.n_slices}")
    if a.n_cols != b.n_rows:
        raise ShapeError(f"inner dimensions differ: {a.shape} * {b.shape}")
    p, m, k = a.n_slices, a.n_rows, a.n_cols
    s = b.n_cols
    if a.is_real and b.is_real:
        h = p // 2 + 1
        fa = np.fft.rfft(
            a.data.real, axis=0, out=_scratch_array("ra", (h, m, k), np.complex128)
        )
        fb = np.fft.rfft(
            b.data.real, axis=0, out=_scratch_array("rb", (h, k, s), np.complex128)
        )
        fc = np.matmul(fa, fb, out=_scratch_array("rc", (h, m, s), np.complex128))
        cd = np.fft.irfft(
            fc, n=p, axis=0, out=_scratch_array("rd", (p, m, s), np.float64)
        )
        return Tensor3._wrap(cd.astype(np.complex128), real=True)
    fa = np.fft.fft(a.data, axis=0, out=_scratch_array("za", (p, m, k), np.complex128))
    fb = np.fft.fft(b.data, axis=0, out=_scratch_array("zb", (p, k, s), np.complex128))
    fc = np.matmul(fa, fb, out=_scratch_array("zc", (p, m, s), np.complex128))
    return Tensor3._wrap(np.fft.ifft(fc, axis=0))


def _singular_check(blocks: np.ndarray, tol: float, what: str):
    """Raise SingularError naming the first block whose smallest singular
    value is at most tol times its largest."""
    svals = np.linalg.svd(blocks, compute_uv=False)
    for i in range(blocks.shape[0]):
        smax, smin = svals[i, 0], svals[i, -1]
        if smin <= tol * smax or smax == 0.0:
            raise SingularError(
                f"{what}: Fourier block {i + 1} of {blocks.shape[0]} is singular "
                f"(sigma_min={smin:.3e}, sigma_max={smax:.3e})",
                block_index=i + 1,
            )


def tinv(a: Tensor3, tol: float | None = None) -> Tensor3:
    """T-product inverse of an F-square tensor.

    Raises SingularError, naming the first singular Fourier block, when
    any block's smallest singular value is <= tol times its largest.
    """
    if not a.is_f_square():
        raise ShapeError(f"tinv requires an F-square tensor, got {a.shape}")
    if tol is None:
        tol = TOL_RANK
    fa = _fft_slices(a)
    _singular_check(fa, tol, "tinv")
    return Tensor3(np.fft.ifft(np.linalg.inv(fa), axis=0))


def tpow(a: Tensor3, k: int) -> Tensor3:
    """Non-negative integer t-product power; tpow(a, 0) is the identity."""
    if not a.is_f_square():
        raise ShapeError(f"tpow requires an F-square tensor, got {a.shape}")
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError(f"exponent must be a non-negative integer, got {k!r}")
    if k == 0:
        return identity_tensor(a.n_rows, a.n_slices)
    fa = _fft_slices(a)
    return Tensor3(np.fft.ifft(np.linalg.matrix_power(fa, int(k)), axis=0))


def tpoly_eval(coeffs: Sequence[complex], a: Tensor3) -> Tensor3:
    """Evaluate sum_k coeffs[k] * a^k by Horner's rule in the Fourier domain.

    ``coeffs[0]`` multiplies the identity.  An empty coefficient list
    gives the zero tensor.
    """
    if not a.is_f_square():
        raise ShapeError(f"tpoly_eval requires an F-square tensor, got {a.shape}")
    coeffs = [complex(c) for c in coeffs]
    n, p = a.n_rows, a.n_slices
    fa = _fft_slices(a)
    eye = np.eye(n, dtype=np.complex128)
    acc = np.zeros((p, n, n), dtype=np.complex128)
    for c in reversed(coeffs):
        acc = np.matmul(acc, fa) + c * eye
    return Tensor3(np.fft.ifft(acc, axis=0))


def commutator(a: Tensor3, b: Tensor3) -> Tensor3:
    """tprod(a, b) - tprod(b, a)."""
    return tprod(a, b) - tprod(b, a)


_PREDICATES = ("unitary", "orthogonal", "hermitian", "f_upper", "f_lower", "f_diagonal")


def structure_predicates(a: Tensor3, which: str, tol: float | None = None) -> bool:
    """Tolerance-based structural test.

    which:
        'unitary'    -- conj_transpose(a) * a and a * conj_transpose(a)
                        both within tol of the identity
        'orthogonal' -- real entries and unitary
        'hermitian'  -- a equals conj_transpose(a)
        'f_upper', 'f_lower', 'f_diagonal' -- every frontal slice has the
                        named triangular/diagonal zero pattern

    Residuals are measured relative to the natural scale of each test.
    """
    if which not in _PREDICATES:
        raise ValueError(f"unknown predicate {which!r}, expected one of {_PREDICATES}")
    if tol is None:
        tol = TOL_PRED

    if which in ("f_upper", "f_lower", "f_diagonal"):
        m, n, p = a.shape
        rows, cols = np.indices((m, n))
        if which == "f_upper":
            mask = rows > cols
        elif which == "f_lower":
            mask = rows < cols
        else:
            mask = rows != cols
        off = np.abs(a.data[:, mask])
        bound = tol * float(np.max(np.abs(a.data)))
        return bool(off.size == 0 or float(np.max(off)) <= bound)

    if which == "hermitian":
        if not a.is_f_square():
            return False
        resid = fro_norm(a - conj_transpose(a))
        return resid <= tol * max(1.0, fro_norm(a))

    # unitary / orthogonal
    if not a.is_f_square():
        return False
    if which == "orthogonal":
        im = float(np.max(np.abs(a.data.imag)))
        if im > tol * max(1.0, float(np.max(np.abs(a.data)))):
            return False
    eye = identity_tensor(a.n_rows, a.n_slices)
    scale = max(1.0, fro_norm(a) ** 2)
    left = fro_norm(tprod(conj_transpose(a), a) - eye)
    right = fro_norm(tprod(a, conj_transpose(a)) - eye)
    return left <= tol * scale and right <= tol * scale
