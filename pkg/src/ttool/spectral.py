"""T-eigenvalues, T-Jordan canonical form, and related spectral structure.

All spectral work happens per Fourier block: complex Schur form,
single-linkage eigenvalue clustering, Sylvester-based block decoupling,
then a nilpotent staircase per cluster to read off Jordan block sizes
and generalized eigenvector chains.

Reliability domain: eigenvalue clusters separated well beyond
``TOL_CLUSTER`` times the spectral radius (synthesized inputs qualify).
Ambiguous spectra raise IllConditionedError rather than returning a
structure the data cannot support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .algebra import _fft_slices, commutator, tinv, tpow, tprod
from .core import Tensor3, fro_norm
from .defaults import TOL_CLUSTER, TOL_NIL, TOL_PRED, TOL_STAIRCASE
from .errors import (
    ConvergenceError,
    IllConditionedError,
    NotCommutingError,
    NotDiagonalizableError,
    ShapeError,
)
from .transform import from_blocks

# noise floor for "this cluster is semisimple", relative to the block norm
_NOISE_FLOOR_REL = 1e-10

# a whole spectrum counts as rounding dust (nilpotent block) only when its
# radius is far below the operator norm; eigenvalue dust of perturbed
# nilpotent blocks measures under 5e-6 relative even at condition 1e3, while
# genuine clustered spectra of such blocks stay above 9e-4
_DUST_REL = 5e-5


@dataclass(frozen=True)
class TEigenvalues:
    """T-eigenvalues: the union of all Fourier-block eigenvalues.

    ``values`` has shape (p, n); row i holds block i's eigenvalues
    sorted by (real, imag).  There are always n*p of them, with
    multiplicity.
    """

    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def p(self) -> int:
        return self.values.shape[0]

    def per_slice(self, i: int) -> np.ndarray:
        return self.values[i]

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class TJordan:
    """T-Jordan factorization a = tinv(p_tensor) * j_tensor * p_tensor.

    ``block_structure[i]`` lists (eigenvalue, size) pairs for Fourier
    block i, clusters ordered by (Re, Im) and sizes descending within a
    cluster.  Every Fourier block of ``j_tensor`` is an exact Jordan
    matrix in that order.
    """

    p_tensor: Tensor3
    j_tensor: Tensor3
    block_structure: list


def t_eigenvalues(a: Tensor3) -> TEigenvalues:
    """Eigenvalues of every Fourier block of an F-square tensor."""
    if not a.is_f_square():
        raise ShapeError(f"t_eigenvalues requires an F-square tensor, got {a.shape}")
    fa = _fft_slices(a)
    try:
        vals = np.linalg.eigvals(fa)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    out = np.empty_like(vals)
    for i in range(vals.shape[0]):
        idx = np.lexsort((vals[i].imag, vals[i].real))
        out[i] = vals[i][idx]
    return TEigenvalues(out)


# --- clustering ---------------------------------------------------------


def _single_linkage(eigs: np.ndarray, delta: float):
    """Indices of eigenvalue clusters (connected components at distance
    <= delta), ordered by cluster mean (Re, Im)."""
    m = eigs.shape[0]
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(m):
        for j in range(i + 1, m):
            if abs(eigs[i] - eigs[j]) <= delta:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    clusters = [np.asarray(g, dtype=int) for g in groups.values()]
    centers = [complex(np.mean(eigs[g])) for g in clusters]
    order = sorted(range(len(clusters)), key=lambda c: (centers[c].real, centers[c].imag))
    return [clusters[c] for c in order]


def _check_cluster_quality(eigs, clusters, delta):
    """Separation sanity: inter-cluster gaps must clear 2*delta and no
    cluster may chain out to a diameter beyond 10*delta."""
    for ci in range(len(clusters)):
        ei = eigs[clusters[ci]]
        if ei.shape[0] > 1:
            diam = float(np.max(np.abs(ei[:, None] - ei[None, :])))
            if diam > 10.0 * delta:
                raise IllConditionedError(
                    f"eigenvalue cluster diameter {diam:.3e} exceeds 10x the "
                    f"clustering tolerance {delta:.3e}; structure is ambiguous"
                )
        for cj in range(ci + 1, len(clusters)):
            ej = eigs[clusters[cj]]
            gap = float(np.min(np.abs(ei[:, None] - ej[None, :])))
            if gap < 2.0 * delta:
                raise IllConditionedError(
                    f"eigenvalue clusters separated by {gap:.3e}, below 2x the "
                    f"clustering tolerance {delta:.3e}; structure is ambiguous"
                )


# --- Schur reordering and decoupling ------------------------------------


def _cluster_ordered_schur(d: np.ndarray, tol_cluster: float):
    """Complex Schur form of ``d`` with eigenvalues grouped by cluster.

    Returns (t, z, sizes, centers): cluster c occupies the diagonal
    block at offset sum(sizes[:c]), clusters ordered by center (Re, Im).
    """
    t, z = scipy.linalg.schur(d, output="complex")
    eigs = np.diag(t).copy()
    rho = float(np.max(np.abs(eigs)))
    op_norm = float(np.linalg.norm(d, 2))
    if rho <= _DUST_REL * op_norm:
        # whole spectrum sits at rounding level: one cluster at ~0
        clusters = [np.arange(d.shape[0])]
    else:
        delta = tol_cluster * rho
        clusters = _single_linkage(eigs, delta)
        _check_cluster_quality(eigs, clusters, delta)

    labels = [0] * d.shape[0]
    for ci, idxs in enumerate(clusters):
        for pos in idxs:
            labels[pos] = ci
    front = 0
    for ci in range(len(clusters)):
        positions = [pos for pos in range(len(labels)) if labels[pos] == ci]
        for src in positions:
            # moves only shift entries between the slots, later positions
            # of this cluster (all > src) stay valid
            if src != front:
                t, z, info = lapack.ztrexc(t, z, src + 1, front + 1)
                if info != 0:
                    raise ConvergenceError(f"Schur reordering failed (info={info})")
                labels.insert(front, labels.pop(src))
            front += 1

    sizes = [len(c) for c in clusters]
    # centers from the reordered diagonal: exact means per cluster block
    centers = []
    off = 0
    diag = np.diag(t)
    for sz in sizes:
        centers.append(complex(np.mean(diag[off:off + sz])))
        off += sz
    return t, z, sizes, centers


def _block_diagonalize(t: np.ndarray, sizes):
    """Decouple an ordered block-triangular Schur form.

    Returns (r, blocks) with t = r @ blockdiag(blocks) @ inv(r) and r
    unit block-upper-triangular, via successive Sylvester solves.
    """
    n = t.shape[0]
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    r_total = np.eye(n, dtype=np.complex128)
    tt = np.array(t, dtype=np.complex128)
    for c in range(len(sizes) - 1):
        i0, i1 = int(offsets[c]), int(offsets[c + 1])
        a_blk = tt[i0:i1, i0:i1]
        b_blk = tt[i1:, i1:]
        c_blk = tt[i0:i1, i1:]
        try:
            x = scipy.linalg.solve_sylvester(a_blk, -b_blk, -c_blk)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise IllConditionedError(
                f"cluster decoupling failed between cluster {c} and its tail: {exc}"
            ) from exc
        s = np.eye(n, dtype=np.complex128)
        s[i0:i1, i1:] = x
        s_inv = np.eye(n, dtype=np.complex128)
        s_inv[i0:i1, i1:] = -x
        tt = s_inv @ tt @ s
        r_total = r_total @ s
    blocks = [
        tt[int(offsets[c]):int(offsets[c + 1]), int(offsets[c]):int(offsets[c + 1])]
        for c in range(len(sizes))
    ]
    return r_total, blocks


# --- nilpotent staircase -------------------------------------------------


def _staircase_sizes(nil: np.ndarray, tol: float, noise_floor: float):
    """Jordan block sizes (descending) of a numerically nilpotent matrix.

    Ranks of successive powers are decided at ``tol`` relative to each
    power's largest singular value, with ``noise_floor`` separating
    genuine structure from rounding dust.  Also returns the orthonormal
    null-space bases of each power, used for chain extraction.
    """
    m = nil.shape[0]
    if m == 0:
        return [], {}
    norm_n = float(np.linalg.norm(nil, 2))
    null_bases = {0: np.zeros((m, 0), dtype=np.complex128)}
    if norm_n <= noise_floor:
        # semisimple cluster: all blocks size 1
        null_bases[1] = np.eye(m, dtype=np.complex128)
        return [1] * m, null_bases

    growth = max(1.0, norm_n)
    ranks = [m]
    cur = np.eye(m, dtype=np.complex128)
    for j in range(1, m + 1):
        cur = cur @ nil
        u, sig, vh = np.linalg.svd(cur)
        if sig[0] <= noise_floor * growth ** (j - 1):
            rank = 0
        else:
            rank = int(np.count_nonzero(sig > tol * sig[0]))
        ranks.append(rank)
        null_bases[j] = vh[rank:].conj().T
        if rank == 0:
            break
    if ranks[-1] != 0:
        raise IllConditionedError(
            "cluster is not numerically nilpotent after centering; eigenvalue "
            "spread sits between the noise floor and the staircase tolerance"
        )
    s = len(ranks) - 1
    # blocks of size >= j
    b = [ranks[j - 1] - ranks[j] for j in range(1, s + 1)]
    if any(b[j] < b[j + 1] for j in range(len(b) - 1)) or (m > 0 and b[0] <= 0):
        raise IllConditionedError(
            "inconsistent rank staircase; Jordan structure is numerically ambiguous"
        )
    b.append(0)
    sizes = []
    for j in range(s, 0, -1):
        sizes.extend([j] * (b[j - 1] - b[j]))
    if sum(sizes) != m:
        raise IllConditionedError(
            "rank staircase does not account for the cluster dimension"
        )
    return sizes, null_bases


def _orthonormal_columns(cols: np.ndarray) -> np.ndarray:
    if cols.size == 0:
        return cols.reshape(cols.shape[0], 0)
    q, _ = np.linalg.qr(cols)
    return q


def _jordan_chains(nil: np.ndarray, sizes, null_bases):
    """Generalized eigenvector chains realizing the staircase sizes.

    Returns y with nil @ y = y @ N_J where N_J is the nilpotent part of
    blockdiag(J_size(0)) in descending size order.
    """
    m = nil.shape[0]
    if m == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    s = max(sizes)
    exact = {ell: sizes.count(ell) for ell in range(1, s + 1)}
    chains = []
    level_vecs: list[np.ndarray] = []
    for ell in range(s, 0, -1):
        starters = []
        k_l = exact.get(ell, 0)
        if k_l > 0:
            cand = null_bases.get(ell)
            if cand is None or cand.shape[1] < k_l:
                raise IllConditionedError("null space too small for chain extraction")
            forb_cols = [null_bases[ell - 1]] + [v.reshape(-1, 1) for v in level_vecs]
            forb = np.hstack(forb_cols) if forb_cols else np.zeros((m, 0))
            q_forb = _orthonormal_columns(forb)
            proj = cand - q_forb @ (q_forb.conj().T @ cand) if q_forb.shape[1] else cand
            u, sig, _ = np.linalg.svd(proj, full_matrices=False)
            if sig.shape[0] < k_l or sig[k_l - 1] <= 1e-6:
                raise IllConditionedError(
                    f"chain starters at level {ell} are numerically degenerate"
                )
            starters = [u[:, i] for i in range(k_l)]
            for v in starters:
                down = [v]
                for _ in range(ell - 1):
                    down.append(nil @ down[-1])
                cols = list(reversed(down))  # bottom-up: eigenvector first
                arr = np.column_stack(cols)
                arr = arr / max(float(np.max(np.linalg.norm(arr, axis=0))), 1e-300)
                chains.append(arr)
        level_vecs = [nil @ w for w in (level_vecs + starters)]
    return np.hstack(chains)


def _jordan_matrix_for(center: complex, sizes) -> np.ndarray:
    m = sum(sizes)
    j = np.zeros((m, m), dtype=np.complex128)
    off = 0
    for sz in sizes:
        j[off:off + sz, off:off + sz] = center * np.eye(sz)
        for i in range(sz - 1):
            j[off + i, off + i + 1] = 1.0
        off += sz
    return j


def _block_jordan(d: np.ndarray, tol_cluster: float, want_chains: bool):
    """Jordan data of one Fourier block.

    Returns (structure, x, j) where structure is a list of
    (eigenvalue, size) pairs and, when ``want_chains``, d ~ x @ j @ inv(x)
    with j the exact Jordan matrix of the structure.
    """
    n = d.shape[0]
    t, z, sizes, centers = _cluster_ordered_schur(d, tol_cluster)
    r, blocks = _block_diagonalize(t, sizes)
    parent_scale = max(float(np.linalg.norm(d, 2)), 1e-300)
    noise_floor = _NOISE_FLOOR_REL * parent_scale

    structure = []
    y_blocks = []
    j_blocks = []
    for center, blk in zip(centers, blocks):
        nil = blk - center * np.eye(blk.shape[0], dtype=np.complex128)
        # eigenvalue spread inside a merged cluster is below resolution by
        # construction; anything at that scale is dust, not structure
        radius = float(np.max(np.abs(np.diag(blk) - center))) if blk.size else 0.0
        floor = max(noise_floor, 4.0 * radius)
        cluster_sizes, null_bases = _staircase_sizes(nil, TOL_STAIRCASE, floor)
        structure.extend((center, sz) for sz in cluster_sizes)
        if want_chains:
            y_blocks.append(_jordan_chains(nil, cluster_sizes, null_bases))
            j_blocks.append(_jordan_matrix_for(center, cluster_sizes))
    if not want_chains:
        return structure, None, None

    y = scipy.linalg.block_diag(*y_blocks) if y_blocks else np.zeros((0, 0))
    jmat = scipy.linalg.block_diag(*j_blocks) if j_blocks else np.zeros((0, 0))
    x = z @ r @ y
    return structure, x.astype(np.complex128), jmat.astype(np.complex128)


def jordan_factorize(a: Tensor3, tol_cluster: float | None = None) -> TJordan:
    """T-Jordan canonical form: a = tinv(p) * j * p.

    Every Fourier block of ``j`` is an exact Jordan matrix (cluster
    eigenvalues on the diagonal, unit superdiagonal inside blocks),
    clusters ordered by (Re, Im) with sizes descending.

    Raises IllConditionedError when the spectrum does not support a
    numerically meaningful Jordan structure (clusters too close,
    ambiguous staircases).
    """
    if not a.is_f_square():
        raise ShapeError(f"jordan_factorize requires an F-square tensor, got {a.shape}")
    if tol_cluster is None:
        tol_cluster = TOL_CLUSTER
    fa = _fft_slices(a)
    p = a.n_slices
    x_blocks = np.empty_like(fa)
    j_blocks = np.empty_like(fa)
    structures = []
    for i in range(p):
        structure, x, jmat = _block_jordan(fa[i], tol_cluster, want_chains=True)
        structures.append(structure)
        try:
            x_blocks[i] = np.linalg.inv(x)  # p-block is the inverse transform
        except np.linalg.LinAlgError as exc:
            raise IllConditionedError(
                f"Jordan chain basis is singular on Fourier block {i + 1}"
            ) from exc
        j_blocks[i] = jmat
    p_tensor = Tensor3(np.fft.ifft(x_blocks, axis=0))
    j_tensor = Tensor3(np.fft.ifft(j_blocks, axis=0))
    return TJordan(p_tensor=p_tensor, j_tensor=j_tensor, block_structure=structures)


def jordan_synthesize(structure, p_tensor: Tensor3) -> Tensor3:
    """Plant a T-Jordan structure: returns tinv(p) * j * p.

    ``structure`` lists, per slice, (eigenvalue, size) pairs whose sizes
    must sum to n on every slice.  The Fourier blocks of the result have
    exactly the requested Jordan structure (up to rounding).
    """
    if not p_tensor.is_f_square():
        raise ShapeError(f"transform tensor must be F-square, got {p_tensor.shape}")
    n, p = p_tensor.n_rows, p_tensor.n_slices
    if len(structure) != p:
        raise ShapeError(f"structure lists {len(structure)} slices, tensor has {p}")
    j_blocks = np.empty((p, n, n), dtype=np.complex128)
    for i, slice_struct in enumerate(structure):
        sizes = [int(sz) for _, sz in slice_struct]
        if sum(sizes) != n:
            raise ShapeError(
                f"slice {i}: block sizes sum to {sum(sizes)}, expected {n}"
            )
        j_blocks[i] = scipy.linalg.block_diag(
            *[_jordan_matrix_for(complex(lam), [int(sz)]) for lam, sz in slice_struct]
        )
    j_tensor = Tensor3(np.fft.ifft(j_blocks, axis=0))
    p_inv = tinv(p_tensor)
    return tprod(p_inv, tprod(j_tensor, p_tensor))


def is_f_diagonalizable(a: Tensor3, tol_cluster: float | None = None) -> bool:
    """True when every Fourier block is diagonalizable, i.e. all Jordan
    blocks have size 1 (geometric = algebraic multiplicity throughout)."""
    if not a.is_f_square():
        raise ShapeError(f"is_f_diagonalizable requires an F-square tensor, got {a.shape}")
    if tol_cluster is None:
        tol_cluster = TOL_CLUSTER
    fa = _fft_slices(a)
    for i in range(a.n_slices):
        structure, _, _ = _block_jordan(fa[i], tol_cluster, want_chains=False)
        if any(sz > 1 for _, sz in structure):
            return False
    return True


def nilpotency(a: Tensor3, tol_cluster: float | None = None) -> int | None:
    """Nilpotency test: None if not nilpotent, else the smallest s with
    a^s ~ 0.

    A tensor is nilpotent iff all its T-eigenvalues vanish; the index is
    found by the norm test ||a^s|| <= TOL_NIL * ||a||^s, cross-checkable
    against the largest Jordan block at eigenvalue 0.
    """
    if not a.is_f_square():
        raise ShapeError(f"nilpotency requires an F-square tensor, got {a.shape}")
    if tol_cluster is None:
        tol_cluster = TOL_CLUSTER
    fa = _fft_slices(a)
    sig_max = float(np.max(np.linalg.svd(fa, compute_uv=False))) if fa.size else 0.0
    ev = t_eigenvalues(a)
    if ev.max_modulus() > tol_cluster * sig_max:
        return None
    norm_a = fro_norm(a)
    if norm_a == 0.0:
        return 1
    n = a.n_rows
    for s in range(1, n + 1):
        if fro_norm(tpow(a, s)) <= TOL_NIL * norm_a ** s:
            return s
    # norm test inconclusive (extreme scaling); fall back to the staircase
    worst = 1
    for i in range(a.n_slices):
        structure, _, _ = _block_jordan(fa[i], tol_cluster, want_chains=False)
        worst = max(worst, max(sz for _, sz in structure))
    return worst


def simultaneous_diagonalize(family, tol_commute: float | None = None,
                             tol_cluster: float | None = None):
    """Common F-diagonalization of a commuting family.

    Returns (p_tensor, diags): an invertible transform and a list of
    exactly F-diagonal tensors with family[k] ~ tinv(p) * diags[k] * p.

    Raises NotCommutingError if any pair fails to commute, and
    NotDiagonalizableError if a member is defective.
    """
    family = list(family)
    if not family:
        raise ValueError("family must contain at least one tensor")
    shape = family[0].shape
    for k, member in enumerate(family):
        if not member.is_f_square():
            raise ShapeError(f"family member {k} is not F-square: {member.shape}")
        if member.shape != shape:
            raise ShapeError(f"family member {k} has shape {member.shape}, expected {shape}")
    if tol_commute is None:
        tol_commute = TOL_PRED
    if tol_cluster is None:
        tol_cluster = TOL_CLUSTER
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            scale = max(1.0, fro_norm(family[i]) * fro_norm(family[j]))
            resid = fro_norm(commutator(family[i], family[j]))
            if resid > tol_commute * scale:
                raise NotCommutingError(
                    f"family members {i} and {j} do not commute "
                    f"(residual {resid:.3e} > {tol_commute * scale:.3e})"
                )

    n, _, p = shape
    ffts = [_fft_slices(member) for member in family]
    x_inv_blocks = np.empty((p, n, n), dtype=np.complex128)
    diag_blocks = [np.empty((p, n, n), dtype=np.complex128) for _ in family]

    for i in range(p):
        spaces = [np.eye(n, dtype=np.complex128)]
        for fa in ffts:
            mat = fa[i]
            refined = []
            for q in spaces:
                if q.shape[1] == 1:
                    refined.append(q)
                    continue
                restricted = q.conj().T @ mat @ q
                t, z, sizes, _ = _cluster_ordered_schur(restricted, tol_cluster)
                if len(sizes) == 1:
                    refined.append(q)
                    continue
                r, _ = _block_diagonalize(t, sizes)
                basis = z @ r
                off = 0
                for sz in sizes:
                    chunk = _orthonormal_columns(basis[:, off:off + sz])
                    refined.append(q @ chunk)
                    off += sz
            spaces = refined
        x = np.hstack(spaces)
        try:
            x_inv = np.linalg.inv(x)
        except np.linalg.LinAlgError as exc:
            raise IllConditionedError(f"common eigenbasis is singular: {exc}") from exc
        x_inv_blocks[i] = x_inv
        for k, fa in enumerate(ffts):
            lam = x_inv @ fa[i] @ x
            off = lam - np.diag(np.diag(lam))
            scale = max(1.0, float(np.linalg.norm(fa[i])))
            if float(np.linalg.norm(off)) > 1e-7 * scale * max(1.0, np.linalg.cond(x)):
                raise NotDiagonalizableError(
                    f"family member {k} is not F-diagonalizable on slice {i}"
                )
            diag_blocks[k][i] = np.diag(np.diag(lam))

    p_tensor = Tensor3(np.fft.ifft(x_inv_blocks, axis=0))
    diags = [Tensor3(np.fft.ifft(db, axis=0)) for db in diag_blocks]
    return p_tensor, diags
