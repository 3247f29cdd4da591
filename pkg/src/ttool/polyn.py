"""Characteristic and minimal polynomials of F-square tensors.

Both are least common multiples over the Fourier blocks, stored as root
multisets: for each clustered root the multiplicity is the maximum over
blocks of that block's multiplicity (algebraic for the characteristic
polynomial, largest Jordan block for the minimal one).  Roots are never
expanded into coefficient vectors internally; expansion is offered only
for display.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import _fft_slices, tprod
from .core import Tensor3, fro_norm, identity_tensor
from .defaults import TOL_CLUSTER
from .errors import ConvergenceError, IllConditionedError, ShapeError
from .spectral import _block_jordan, _check_cluster_quality, _single_linkage


@dataclass(frozen=True)
class RootMultiset:
    """Monic polynomial represented by (root, multiplicity) pairs,
    sorted by (real, imag)."""

    roots: tuple[tuple[complex, int], ...]

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def multiplicity_of_zero(self) -> int:
        for root, mult in self.roots:
            if root == 0:
                return mult
        return 0

    def coefficients(self) -> np.ndarray:
        """Expanded monic coefficients, highest power first."""
        coef = np.array([1.0 + 0.0j])
        for root, mult in self.roots:
            for _ in range(mult):
                coef = np.convolve(coef, [1.0, -root])
        return coef


def _collect_clusters(tagged, a: Tensor3, tol_cluster: float):
    """Cluster (block, value) pairs across all Fourier blocks.

    Values within tol_cluster * sigma_max of zero collapse onto the
    exact root 0; the rest get single-linkage clusters at a delta
    relative to their own largest modulus.  Values in the decade above
    the zero threshold are ambiguous and raise IllConditionedError.
    Returns a list of (center, members) with members = (block, payload).
    """
    fa = _fft_slices(a)
    svals = np.linalg.svd(fa, compute_uv=False)
    sig_max = float(svals.max()) if svals.size else 0.0
    zero_thr = tol_cluster * sig_max

    zero_members = []
    live = []  # (block, value, payload)
    for block, value, payload in tagged:
        mod = abs(value)
        if mod <= zero_thr:
            zero_members.append((block, payload))
        elif mod <= 10.0 * zero_thr:
            raise IllConditionedError(
                f"root modulus {mod:.3e} straddles the zero threshold "
                f"{zero_thr:.3e}; zero multiplicity is ambiguous"
            )
        else:
            live.append((block, value, payload))

    out = []
    if zero_members:
        out.append((0.0 + 0.0j, zero_members))
    if live:
        vals = np.array([v for _, v, _ in live])
        delta = tol_cluster * float(np.max(np.abs(vals)))
        clusters = _single_linkage(vals, delta)
        _check_cluster_quality(vals, clusters, delta)
        for idx in clusters:
            center = complex(np.mean(vals[idx]))
            out.append((center, [(live[i][0], live[i][2]) for i in idx]))
    out.sort(key=lambda item: (item[0].real, item[0].imag))
    return out


def t_char_poly(a: Tensor3, tol_cluster: float | None = None) -> RootMultiset:
    """Least common multiple of the per-block characteristic polynomials.

    Multiplicity of each clustered root is the maximum over Fourier
    blocks of its algebraic multiplicity in that block.
    """
    if not a.is_f_square():
        raise ShapeError(f"t_char_poly requires an F-square tensor, got {a.shape}")
    if tol_cluster is None:
        tol_cluster = TOL_CLUSTER
    fa = _fft_slices(a)
    try:
        vals = np.linalg.eigvals(fa)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    tagged = [
        (i, vals[i, j], 1)
        for i in range(vals.shape[0])
        for j in range(vals.shape[1])
    ]
    roots = []
    for center, members in _collect_clusters(tagged, a, tol_cluster):
        counts: dict[int, int] = {}
        for block, _ in members:
            counts[block] = counts.get(block, 0) + 1
        roots.append((center, max(counts.values())))
    return RootMultiset(tuple(roots))


def t_min_poly(a: Tensor3, tol_cluster: float | None = None) -> RootMultiset:
    """Least common multiple of the per-block minimal polynomials.

    Per block, each eigenvalue contributes its largest Jordan block
    size; across blocks the clustered multiplicity is the maximum.
    Divides t_char_poly; for a nilpotent tensor of index s equals x^s.
    """
    if not a.is_f_square():
        raise ShapeError(f"t_min_poly requires an F-square tensor, got {a.shape}")
    if tol_cluster is None:
        tol_cluster = TOL_CLUSTER
    fa = _fft_slices(a)
    tagged = []
    for i in range(fa.shape[0]):
        structure, _, _ = _block_jordan(fa[i], tol_cluster, want_chains=False)
        largest: dict[complex, int] = {}
        for center, size in structure:
            largest[center] = max(largest.get(center, 0), size)
        for center, size in largest.items():
            tagged.append((i, center, size))
    roots = []
    for center, members in _collect_clusters(tagged, a, tol_cluster):
        roots.append((center, max(size for _, size in members)))
    return RootMultiset(tuple(roots))


def poly_residual(ms: RootMultiset, a: Tensor3) -> float:
    """Frobenius norm of prod_r (a - root_r * I)^{mult_r}, evaluated by
    repeated t-products.  Zero (to rounding) exactly when ``ms`` is an
    annihilating polynomial of ``a``."""
    if not a.is_f_square():
        raise ShapeError(f"poly_residual requires an F-square tensor, got {a.shape}")
    n, p = a.n_rows, a.n_slices
    eye = identity_tensor(n, p)
    acc = eye
    for root, mult in ms.roots:
        shifted = a - complex(root) * eye
        for _ in range(mult):
            acc = tprod(acc, shifted)
    return fro_norm(acc)
