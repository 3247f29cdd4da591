"""Third-order tensor value type and its block-circulant embedding.

A tensor ``a`` of shape m x n x p is stored as a stack of p frontal
slices.  ``bcirc`` embeds it as the mp x np block-circulant matrix whose
(i, j) block is slice ``1 + ((i - j) mod p)``; ``unfold``/``fold`` move
between a tensor and its first block column.  All t-product operations
in this package are defined through this embedding.
"""

from __future__ import annotations

import json

import numpy as np

from .defaults import TOL_STRUCT
from .errors import ShapeError, StructureError


class Tensor3:
    """Immutable complex tensor with p frontal slices of shape m x n.

    Parameters
    ----------
    slices : array_like
        Stack of frontal slices, shape (p, m, n).  Slice-major layout:
        slice index outermost, then row, then column.

    Notes
    -----
    ``shape`` follows the mathematical m x n x p convention while the
    backing ``data`` array keeps the (p, m, n) slice-major layout.  The
    backing array is read-only; operations return new tensors.
    """

    __slots__ = ("_data", "_real")

    def __init__(self, slices):
        arr = np.array(slices, dtype=np.complex128, copy=True, order="C")
        if arr.ndim != 3:
            raise ShapeError(f"expected a stack of matrices, got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise ShapeError(f"tensor dimensions must be positive, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor entries must be finite")
        arr.flags.writeable = False
        self._data = arr
        self._real = None

    @classmethod
    def _wrap(cls, arr: np.ndarray, real=None) -> "Tensor3":
        # trusted constructor for freshly computed C-order complex128 arrays
        t = object.__new__(cls)
        arr.flags.writeable = False
        t._data = arr
        t._real = real
        return t

    @property
    def is_real(self) -> bool:
        """True when every entry has zero imaginary part (cached)."""
        if self._real is None:
            self._real = not self._data.imag.any()
        return self._real

    @property
    def data(self) -> np.ndarray:
        """Read-only (p, m, n) array of frontal slices."""
        return self._data

    @property
    def n_rows(self) -> int:
        return self._data.shape[1]

    @property
    def n_cols(self) -> int:
        return self._data.shape[2]

    @property
    def n_slices(self) -> int:
        return self._data.shape[0]

    @property
    def shape(self) -> tuple[int, int, int]:
        """(n_rows, n_cols, n_slices)."""
        p, m, n = self._data.shape
        return (m, n, p)

    def slice(self, k: int) -> np.ndarray:
        """Frontal slice k (0-based)."""
        return self._data[k]

    def is_f_square(self) -> bool:
        return self.n_rows == self.n_cols

    def __repr__(self):
        m, n, p = self.shape
        return f"Tensor3(shape={m}x{n}x{p})"

    def _check_same_shape(self, other):
        if not isinstance(other, Tensor3):
            raise TypeError(f"expected Tensor3, got {type(other).__name__}")
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same_shape(other)
        return Tensor3(self._data + other._data)

    def __sub__(self, other):
        self._check_same_shape(other)
        return Tensor3(self._data - other._data)

    def __neg__(self):
        return Tensor3(-self._data)

    def __mul__(self, scalar):
        if isinstance(scalar, Tensor3):
            raise TypeError("use tprod for tensor-tensor products")
        return Tensor3(self._data * complex(scalar))

    __rmul__ = __mul__


def identity_tensor(n: int, p: int) -> Tensor3:
    """Identity of the t-product: first slice I_n, remaining slices zero."""
    if n < 1 or p < 1:
        raise ShapeError(f"identity dimensions must be positive, got n={n}, p={p}")
    data = np.zeros((p, n, n), dtype=np.complex128)
    data[0] = np.eye(n)
    return Tensor3(data)


def bcirc(a: Tensor3) -> np.ndarray:
    """Block-circulant embedding of ``a`` as a dense (mp, np) matrix.

    Block (i, j) is frontal slice ``(i - j) mod p`` (0-based).
    """
    m, n, p = a.shape
    out = np.empty((m * p, n * p), dtype=np.complex128)
    for bi in range(p):
        for bj in range(p):
            out[bi * m:(bi + 1) * m, bj * n:(bj + 1) * n] = a.data[(bi - bj) % p]
    return out


def bcirc_inv(mat, n_rows: int, n_cols: int, n_slices: int, tol: float | None = None) -> Tensor3:
    """Recover the tensor whose block-circulant embedding is ``mat``.

    Verifies that ``mat`` actually carries block-circulant structure:
    every block must match the corresponding first-column block within
    ``tol`` (default ``TOL_STRUCT`` times the largest entry magnitude).

    Raises
    ------
    ShapeError
        If ``mat``'s dimensions are not (n_rows*n_slices, n_cols*n_slices).
    StructureError
        If the block pattern deviates beyond the tolerance.
    """
    mat = np.asarray(mat, dtype=np.complex128)
    m, n, p = n_rows, n_cols, n_slices
    if mat.shape != (m * p, n * p):
        raise ShapeError(
            f"expected a {m * p}x{n * p} matrix for shape {m}x{n}x{p}, got {mat.shape}"
        )
    if tol is None:
        tol = TOL_STRUCT * max(1.0, float(np.max(np.abs(mat))) if mat.size else 0.0)
    slices = np.empty((p, m, n), dtype=np.complex128)
    for k in range(p):
        slices[k] = mat[k * m:(k + 1) * m, 0:n]
    worst = 0.0
    for bi in range(p):
        for bj in range(p):
            block = mat[bi * m:(bi + 1) * m, bj * n:(bj + 1) * n]
            dev = np.max(np.abs(block - slices[(bi - bj) % p]))
            worst = max(worst, float(dev))
    if worst > tol:
        raise StructureError(
            f"matrix is not block-circulant: worst block deviation {worst:.3e} > {tol:.3e}"
        )
    return Tensor3(slices)


def unfold(a: Tensor3) -> np.ndarray:
    """Stack frontal slices vertically into an (mp, n) matrix."""
    m, n, p = a.shape
    return a.data.reshape(m * p, n).copy()


def fold(mat, n_slices: int) -> Tensor3:
    """Inverse of ``unfold``: split an (mp, n) matrix into p slices."""
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.ndim != 2:
        raise ShapeError(f"fold expects a matrix, got ndim={mat.ndim}")
    rows, n = mat.shape
    if n_slices < 1 or rows % n_slices != 0:
        raise ShapeError(f"cannot split {rows} rows into {n_slices} slices")
    m = rows // n_slices
    return Tensor3(mat.reshape(n_slices, m, n))


def conj_transpose(a: Tensor3) -> Tensor3:
    """Tensor conjugate transpose.

    Conjugate-transposes every frontal slice and reverses the order of
    slices 2..p, so that ``bcirc(conj_transpose(a)) == bcirc(a)^H``.
    """
    m, n, p = a.shape
    out = np.empty((p, n, m), dtype=np.complex128)
    out[0] = a.data[0].conj().T
    for k in range(1, p):
        out[k] = a.data[p - k].conj().T
    return Tensor3(out)


def fro_norm(a: Tensor3) -> float:
    """Frobenius norm of ``bcirc(a)``: sqrt(p) times the entry-array norm."""
    return float(np.sqrt(a.n_slices) * np.linalg.norm(a.data))


# --- tensor file format -------------------------------------------------
#
# {"shape": [m, n, p], "data": [[re, im], ...]} with m*n*p entries in
# slice-major order (slice outermost, then row, then column).


def save_tensor(a: Tensor3, path) -> None:
    """Write ``a`` to ``path`` in the JSON tensor format."""
    m, n, p = a.shape
    flat = a.data.ravel()
    doc = {
        "shape": [m, n, p],
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")


def load_tensor(path) -> Tensor3:
    """Read a tensor from the JSON format written by ``save_tensor``.

    Raises ``ValueError`` on schema violations (wrong keys, wrong data
    length, non-finite entries).
    """
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "shape" not in doc or "data" not in doc:
        raise ValueError("tensor file must be an object with 'shape' and 'data'")
    shape = doc["shape"]
    if (not isinstance(shape, list) or len(shape) != 3
            or not all(isinstance(d, int) and d >= 1 for d in shape)):
        raise ValueError(f"'shape' must be three positive integers, got {shape!r}")
    m, n, p = shape
    data = doc["data"]
    if not isinstance(data, list) or len(data) != m * n * p:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise ValueError(f"'data' must hold {m * n * p} [re, im] pairs, got {got}")
    flat = np.empty(m * n * p, dtype=np.complex128)
    for idx, pair in enumerate(data):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(v, (int, float)) for v in pair)):
            raise ValueError(f"data entry {idx} is not an [re, im] pair: {pair!r}")
        flat[idx] = complex(pair[0], pair[1])
    if not np.all(np.isfinite(flat)):
        raise ValueError("tensor entries must be finite")
    return Tensor3(flat.reshape(p, m, n))
