"""Generalized inverses: Moore-Penrose, group and Drazin inverses,
rank/index, range-Hermitian test, core-nilpotent decomposition, and the
two resolvent limit formulas.

Everything runs per Fourier block.  The zero/nonzero spectral split for
the Drazin inverse is relative to each block's spectral radius; blocks
whose whole spectrum sits at rounding level are treated as wholly
nilpotent.  Rank truncations are relative to the largest singular value
across all blocks so that noise blocks are never inverted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import _fft_slices, tpow, tprod
from .core import Tensor3, conj_transpose, fro_norm
from .defaults import TOL_CLUSTER, TOL_GINV, TOL_NIL, TOL_PRED, TOL_RANK, Z_SEQUENCE
from .errors import (
    IllConditionedError,
    ShapeError,
    SingularError,
    TIndexError,
)

_TINY = 1e-300

# geometric grid for the nilpotent resolvent limit: below ~1e-4 the
# spurious spectrum of a perturbed nilpotent block (radius ~ eps^(1/k))
# poisons (N + zI)^-1, so extrapolate to 0 from safely large z instead
NIL_Z_SEQUENCE = (1e-1, 10.0 ** -1.5, 1e-2, 10.0 ** -2.5, 1e-3, 10.0 ** -3.5)


@dataclass(frozen=True)
class GinvReport:
    """A generalized inverse with the residuals of its defining equations.

    ``residuals`` maps equation names to relative residual norms;
    ``t_index`` is populated for the group and Drazin kinds.
    """

    inverse: Tensor3
    kind: str  # 'moore_penrose' | 'group' | 'drazin'
    t_index: int | None
    residuals: dict[str, float]


@dataclass(frozen=True)
class CoreNilpotent:
    """Split a = core + nilpotent with core * nilpotent ≈ 0 and
    nilpotent of nilpotency index ``t_index``."""

    core: Tensor3
    nilpotent: Tensor3
    t_index: int


def _rel(value: float, scale: float) -> float:
    return float(value / max(scale, _TINY))


# --- rank and index ------------------------------------------------------


def t_rank(a: Tensor3, tol: float | None = None) -> int:
    """Sum over Fourier blocks of numerical rank (singular values above
    tol relative to the largest singular value across all blocks)."""
    if tol is None:
        tol = TOL_RANK
    fa = _fft_slices(a)
    svals = np.linalg.svd(fa, compute_uv=False)
    smax = float(svals.max()) if svals.size else 0.0
    if smax == 0.0:
        return 0
    return int(np.sum(svals > tol * smax))


def _matrix_index(mat: np.ndarray, parent_scale: float, tol: float) -> int:
    """Smallest k with rank(mat^k) = rank(mat^{k+1}).

    Ranks of the j-th power use a threshold floored at parent_scale^j so
    that rounding dust left by annihilated nilpotent parts counts as
    rank zero.
    """
    n = mat.shape[0]
    if n == 0:
        return 0
    prev = n
    power = np.eye(n, dtype=np.complex128)
    for k in range(1, n + 2):
        power = power @ mat
        sig = np.linalg.svd(power, compute_uv=False)
        top = float(sig[0]) if sig.size else 0.0
        thr = tol * max(top, parent_scale ** k)
        rank = int(np.sum(sig > thr))
        if rank == prev:
            return k - 1
        prev = rank
    return n


def t_index(a: Tensor3, tol: float | None = None) -> int:
    """Max over Fourier blocks of the matrix index (rank stabilization
    of successive powers); 0 exactly when the tensor is invertible."""
    if not a.is_f_square():
        raise ShapeError(f"t_index requires an F-square tensor, got {a.shape}")
    if tol is None:
        tol = TOL_RANK
    fa = _fft_slices(a)
    svals = np.linalg.svd(fa, compute_uv=False)
    smax = float(svals.max()) if svals.size else 0.0
    return max(_matrix_index(fa[i], smax, tol) for i in range(fa.shape[0]))


# --- Moore-Penrose -------------------------------------------------------


def _block_pinv(fa: np.ndarray, tol: float) -> np.ndarray:
    u, s, vh = np.linalg.svd(fa, full_matrices=False)
    smax = float(s.max()) if s.size else 0.0
    keep = s > tol * smax if smax > 0 else np.zeros_like(s, dtype=bool)
    sinv = np.where(keep, 1.0 / np.where(s > 0, s, 1.0), 0.0)
    return vh.conj().transpose(0, 2, 1) @ (sinv[:, :, np.newaxis] * u.conj().transpose(0, 2, 1))


def _penrose_residuals(a: Tensor3, x: Tensor3) -> dict[str, float]:
    ax = tprod(a, x)
    xa = tprod(x, a)
    return {
        "axa": _rel(fro_norm(tprod(ax, a) - a), fro_norm(a)),
        "xax": _rel(fro_norm(tprod(xa, x) - x), fro_norm(x)),
        "ax_hermitian": _rel(fro_norm(ax - conj_transpose(ax)), max(fro_norm(ax), 1.0)),
        "xa_hermitian": _rel(fro_norm(xa - conj_transpose(xa)), max(fro_norm(xa), 1.0)),
    }


def t_moore_penrose(a: Tensor3, tol: float | None = None) -> GinvReport:
    """Moore-Penrose inverse by per-block singular value decomposition
    with truncation relative to the global largest singular value.

    Accepts rectangular input; the inverse has the transposed shape.
    """
    if tol is None:
        tol = TOL_RANK
    fa = _fft_slices(a)
    x = Tensor3(np.fft.ifft(_block_pinv(fa, tol), axis=0))
    return GinvReport(
        inverse=x,
        kind="moore_penrose",
        t_index=None,
        residuals=_penrose_residuals(a, x),
    )


# --- Drazin and group ----------------------------------------------------


def _schur_split(d: np.ndarray, tol_cluster: float, parent_scale: float):
    """Split one Fourier block at the zero/nonzero spectral boundary.

    Returns (drazin, core, nilpotent, index) dense blocks.  The split
    orders the Schur form so eigenvalues with |lambda| > tol_cluster*rho
    come first, decouples the two diagonal blocks with a Sylvester
    solve, inverts the nonzero part and zeroes the nilpotent part.
    """
    n = d.shape[0]
    eigs = np.linalg.eigvals(d)
    rho = float(np.max(np.abs(eigs))) if n else 0.0
    op_norm = float(np.linalg.norm(d, 2)) if n else 0.0
    if rho <= tol_cluster * op_norm or op_norm == 0.0:
        # whole spectrum at rounding level: wholly nilpotent block
        zero = np.zeros_like(d)
        return zero, zero.copy(), d.copy(), _matrix_index(d, parent_scale, TOL_RANK)

    tau = tol_cluster * rho
    mods = np.abs(eigs)
    straddle = (mods > tau) & (mods <= 10.0 * tau)
    if np.any(straddle):
        worst = float(np.min(mods[straddle]))
        raise IllConditionedError(
            f"eigenvalue modulus {worst:.3e} straddles the zero threshold "
            f"{tau:.3e}; the invertible/nilpotent split is ambiguous"
        )

    t, z, sdim = scipy.linalg.schur(d, output="complex", sort=lambda lam: abs(lam) > tau)
    if sdim == n:
        inv_t = scipy.linalg.solve_triangular(t, np.eye(n, dtype=np.complex128))
        return z @ inv_t @ z.conj().T, d.copy(), np.zeros_like(d), 0

    t11 = t[:sdim, :sdim]
    t12 = t[:sdim, sdim:]
    t22 = t[sdim:, sdim:]
    try:
        y = scipy.linalg.solve_sylvester(t11, -t22, -t12)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise IllConditionedError(
            f"block decoupling failed at the zero/nonzero split: {exc}"
        ) from exc

    def assemble(top: np.ndarray | None, bottom: np.ndarray | None) -> np.ndarray:
        # similarity z @ s @ blockdiag(top, bottom) @ s^-1 @ z^H with
        # s = [[I, y], [0, I]]
        full = np.zeros((n, n), dtype=np.complex128)
        if top is not None:
            full[:sdim, :sdim] = top
            full[:sdim, sdim:] = top @ (-y)
        if bottom is not None:
            full[sdim:, sdim:] = bottom
            full[:sdim, sdim:] += y @ bottom
        return z @ full @ z.conj().T

    inv_t11 = scipy.linalg.solve_triangular(t11, np.eye(sdim, dtype=np.complex128))
    drazin = assemble(inv_t11, None)
    core = assemble(t11, None)
    nilp = assemble(None, t22)
    index = _matrix_index(t22, parent_scale, TOL_RANK)
    return drazin, core, nilp, index


def _drazin_residuals(a: Tensor3, x: Tensor3, k: int) -> dict[str, float]:
    ak = tpow(a, max(k, 0))
    ak_norm = fro_norm(ak)
    if ak_norm <= TOL_NIL * max(1.0, fro_norm(a)) ** max(k, 0):
        # a^k annihilates exactly for a wholly nilpotent a; what is left is
        # rounding dust, and the first equation holds identically
        akxa = 0.0
    else:
        akxa = _rel(fro_norm(tprod(tprod(ak, x), a) - ak), ak_norm)
    ax = tprod(a, x)
    xa = tprod(x, a)
    return {
        "akxa": akxa,
        "xax": _rel(fro_norm(tprod(xa, x) - x), fro_norm(x)),
        "commute": _rel(fro_norm(ax - xa), max(fro_norm(ax), fro_norm(xa), 1.0)),
    }


def _group_residuals(a: Tensor3, x: Tensor3) -> dict[str, float]:
    ax = tprod(a, x)
    xa = tprod(x, a)
    return {
        "axa": _rel(fro_norm(tprod(ax, a) - a), fro_norm(a)),
        "xax": _rel(fro_norm(tprod(xa, x) - x), fro_norm(x)),
        "commute": _rel(fro_norm(ax - xa), max(fro_norm(ax), fro_norm(xa), 1.0)),
    }


def _split_all(a: Tensor3, tol_cluster: float):
    fa = _fft_slices(a)
    svals = np.linalg.svd(fa, compute_uv=False)
    smax = float(svals.max()) if svals.size else 0.0
    drazin = np.empty_like(fa)
    core = np.empty_like(fa)
    nilp = np.empty_like(fa)
    indexes = []
    for i in range(fa.shape[0]):
        try:
            drazin[i], core[i], nilp[i], idx = _schur_split(fa[i], tol_cluster, smax)
        except IllConditionedError as exc:
            raise IllConditionedError(f"Fourier block {i + 1}: {exc}") from exc
        indexes.append(idx)
    return drazin, core, nilp, max(indexes)


def t_drazin(a: Tensor3, tol_cluster: float | None = None, cross_check: bool = False) -> GinvReport:
    """Drazin inverse via the per-block invertible/nilpotent Schur split.

    With cross_check=True the result is compared against the
    independent formula a^k * (a^{2k+1})^+ * a^k and an
    IllConditionedError is raised if the two disagree beyond 1e-6
    relative.
    """
    if not a.is_f_square():
        raise ShapeError(f"t_drazin requires an F-square tensor, got {a.shape}")
    if tol_cluster is None:
        tol_cluster = TOL_CLUSTER
    drazin_blocks, _, _, k = _split_all(a, tol_cluster)
    x = Tensor3(np.fft.ifft(drazin_blocks, axis=0))
    if cross_check:
        alt = drazin_via_formula(a, k)
        scale = max(fro_norm(x), fro_norm(alt), _TINY)
        gap = fro_norm(x - alt) / scale
        if gap > 1e-6:
            raise IllConditionedError(
                f"spectral-split and resolvent-free Drazin routes disagree "
                f"by {gap:.3e} relative; result unreliable"
            )
    return GinvReport(
        inverse=x,
        kind="drazin",
        t_index=k,
        residuals=_drazin_residuals(a, x, k),
    )


def drazin_via_formula(a: Tensor3, k: int | None = None) -> Tensor3:
    """Independent Drazin route a^k * (a^{2k+1})^+ * a^k.

    Free of the Schur split; used as a cross-check.
    """
    if not a.is_f_square():
        raise ShapeError(f"drazin_via_formula requires an F-square tensor, got {a.shape}")
    if k is None:
        k = t_index(a)
    ak = tpow(a, k)
    if fro_norm(ak) <= TOL_NIL * max(1.0, fro_norm(a)) ** k:
        # a^k annihilates exactly for a wholly nilpotent a, which forces
        # the product to zero; never invert the rounding dust
        return Tensor3(np.zeros(a.data.shape, dtype=np.complex128))
    mid = t_moore_penrose(tpow(a, 2 * k + 1)).inverse
    return tprod(tprod(ak, mid), ak)


def t_group_inverse(a: Tensor3, tol_cluster: float | None = None) -> GinvReport:
    """Group inverse: the Drazin inverse restricted to T-index <= 1.

    Raises TIndexError when the T-index is 2 or larger, since no group
    inverse exists then.
    """
    rep = t_drazin(a, tol_cluster)
    if rep.t_index is not None and rep.t_index > 1:
        raise TIndexError(
            f"group inverse requires T-index <= 1, got {rep.t_index}",
            t_index=rep.t_index,
        )
    return GinvReport(
        inverse=rep.inverse,
        kind="group",
        t_index=rep.t_index,
        residuals=_group_residuals(a, rep.inverse),
    )


def is_range_hermitian(a: Tensor3, tol: float | None = None) -> bool:
    """True iff every Fourier block has equal range and conjugate-
    transpose range, tested by comparing the orthogonal projectors
    d @ d^+ and d^+ @ d."""
    if not a.is_f_square():
        raise ShapeError(f"is_range_hermitian requires an F-square tensor, got {a.shape}")
    if tol is None:
        tol = TOL_PRED
    fa = _fft_slices(a)
    pinv = _block_pinv(fa, TOL_RANK)
    left = fa @ pinv
    right = pinv @ fa
    gap = float(np.max(np.linalg.norm(left - right, axis=(1, 2))))
    return gap <= tol


def core_nilpotent(a: Tensor3, tol_cluster: float | None = None, via: str = "drazin") -> CoreNilpotent:
    """Core-nilpotent decomposition a = core + nilpotent.

    via='drazin' builds core = a^2 * a^D; via='split' assembles the core
    directly from the blockwise invertible/nilpotent split.  The two
    agree (tested), which is the empirical uniqueness check.
    """
    if via not in ("drazin", "split"):
        raise ValueError(f"via must be 'drazin' or 'split', got {via!r}")
    if not a.is_f_square():
        raise ShapeError(f"core_nilpotent requires an F-square tensor, got {a.shape}")
    if tol_cluster is None:
        tol_cluster = TOL_CLUSTER
    if via == "drazin":
        rep = t_drazin(a, tol_cluster)
        core = tprod(tprod(a, a), rep.inverse)
        return CoreNilpotent(core=core, nilpotent=a - core, t_index=rep.t_index)
    _, core_blocks, _, k = _split_all(a, tol_cluster)
    core = Tensor3(np.fft.ifft(core_blocks, axis=0))
    return CoreNilpotent(core=core, nilpotent=a - core, t_index=k)


# --- limit formulas ------------------------------------------------------


def _validate_z(z_sequence) -> tuple[float, ...]:
    zs = tuple(float(z) for z in z_sequence)
    if not zs:
        raise ValueError("z_sequence must be nonempty")
    if any(z <= 0 for z in zs):
        raise ValueError("z_sequence entries must be positive")
    if any(b >= a for a, b in zip(zs, zs[1:])):
        raise ValueError("z_sequence must be strictly decreasing")
    return zs


def drazin_limit(
    a: Tensor3,
    l: int | None = None,
    z_sequence=None,
) -> tuple[Tensor3, list[float]]:
    """Resolvent limit (a^{l+1} + z*I)^-1 * a^l -> a^D as z -> 0.

    Requires l >= t_index(a) (default l = t_index(a)).  Returns the
    estimate at the smallest z and the per-z deviations from t_drazin,
    relative to its norm when nonzero.  Raises SingularError when some
    a^{l+1} + z*I is singular (z collides with a block eigenvalue;
    resample z).
    """
    zs = _validate_z(Z_SEQUENCE if z_sequence is None else z_sequence)
    rep = t_drazin(a)
    k = rep.t_index
    if l is None:
        l = k
    if l < k:
        raise TIndexError(
            f"resolvent exponent l={l} is below the T-index {k}; the limit diverges",
            t_index=k,
        )
    fa = _fft_slices(a)
    p, n = fa.shape[0], fa.shape[1]
    al = np.empty_like(fa)
    for i in range(p):
        al[i] = np.linalg.matrix_power(fa[i], l)
    al1 = al @ fa
    eye = np.eye(n, dtype=np.complex128)
    ref = rep.inverse
    ref_norm = fro_norm(ref)
    scale = ref_norm if ref_norm > 0 else 1.0

    estimate = None
    errors: list[float] = []
    for z in zs:
        blocks = np.empty_like(fa)
        for i in range(p):
            try:
                blocks[i] = np.linalg.solve(al1[i] + z * eye, al[i])
            except np.linalg.LinAlgError as exc:
                raise SingularError(
                    f"a^{l + 1} + z*I is singular at z={z:g} on Fourier block "
                    f"{i + 1}; resample z",
                    block_index=i + 1,
                ) from exc
        estimate = Tensor3(np.fft.ifft(blocks, axis=0))
        errors.append(fro_norm(estimate - ref) / scale)
    return estimate, errors


@dataclass(frozen=True)
class NilpotentLimit:
    """Outcome of the resolvent limit z^m (a + z*I)^-1 a^q as z -> 0.

    ``converged`` reports existence; ``value`` is the extrapolated limit
    when it exists, None otherwise; ``norms`` are the evaluation norms
    along the z grid (growing norms signal divergence).
    """

    converged: bool
    value: Tensor3 | None
    norms: tuple[float, ...]


def nilpotent_limit(n_tensor: Tensor3, m: int, q: int, z_sequence=None) -> NilpotentLimit:
    """Evaluate z^m (a + z*I)^-1 * a^q along a decreasing z grid and
    extrapolate to z = 0.

    For nilpotent a of index k the limit exists iff m + q >= k, with
    value (-1)^{m+1} a^{m+q-1} for m > 0 and 0 for m = 0; for general a
    the same evaluation converges to the corresponding Drazin-projected
    power.  Divergence is detected by norm growth along the grid and
    reported as a result, not an error.
    """
    if not n_tensor.is_f_square():
        raise ShapeError(f"nilpotent_limit requires an F-square tensor, got {n_tensor.shape}")
    if m < 0 or q < 0:
        raise ValueError("m and q must be nonnegative")
    zs = _validate_z(NIL_Z_SEQUENCE if z_sequence is None else z_sequence)
    fa = _fft_slices(n_tensor)
    p, n = fa.shape[0], fa.shape[1]
    eye = np.eye(n, dtype=np.complex128)
    aq = np.empty_like(fa)
    for i in range(p):
        aq[i] = np.linalg.matrix_power(fa[i], q)
    # annihilated powers leave rounding dust that the resolvent would
    # amplify by z^-k; snap them to exact zero first
    scale_q = max(1.0, fro_norm(n_tensor)) ** q
    if float(np.linalg.norm(aq)) <= TOL_NIL * scale_q:
        aq[:] = 0.0

    values = []
    norms = []
    for z in zs:
        blocks = np.empty_like(fa)
        for i in range(p):
            try:
                blocks[i] = (z ** m) * np.linalg.solve(fa[i] + z * eye, aq[i])
            except np.linalg.LinAlgError as exc:
                raise SingularError(
                    f"a + z*I is singular at z={z:g} on Fourier block {i + 1}; "
                    f"resample z",
                    block_index=i + 1,
                ) from exc
        values.append(blocks)
        norms.append(float(np.linalg.norm(blocks)))

    if norms[-1] > 10.0 * (norms[0] + _TINY):
        return NilpotentLimit(converged=False, value=None, norms=tuple(norms))

    extrap = _neville_at_zero(zs, values)
    return NilpotentLimit(
        converged=True,
        value=Tensor3(np.fft.ifft(extrap, axis=0)),
        norms=tuple(norms),
    )


def _neville_at_zero(zs, tables):
    """Polynomial extrapolation of matrix-valued samples to z = 0."""
    work = [t.astype(np.complex128, copy=True) for t in tables]
    count = len(work)
    for j in range(1, count):
        for i in range(count - j):
            zi, zij = zs[i], zs[i + j]
            work[i] = (zij * work[i] - zi * work[i + 1]) / (zij - zi)
    return work[0]
