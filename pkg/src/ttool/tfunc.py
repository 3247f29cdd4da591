"""Tensor functions: per-Fourier-block matrix functions and power series.

A function f lifts to an F-square tensor by applying a dense matrix
function to every Fourier block and transforming back; this equals the
first block column of f applied to the whole block-circulant embedding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import _fft_slices, _singular_check, tpoly_eval
from .core import Tensor3
from .defaults import TOL_RANK
from .errors import DomainError, RadiusError, ShapeError
from .spectral import t_eigenvalues

_NAMED = ("exp", "sin", "cos", "log1p", "pow")


def tfunc_apply(a: Tensor3, f) -> Tensor3:
    """Apply a matrix-function evaluator blockwise.

    ``f`` maps an (n, n) complex ndarray to an (n, n) ndarray.  Raises
    DomainError when the evaluator fails or returns non-finite entries
    (spectrum outside f's domain).
    """
    if not a.is_f_square():
        raise ShapeError(f"tfunc_apply requires an F-square tensor, got {a.shape}")
    n, p = a.n_rows, a.n_slices
    fa = _fft_slices(a)
    out = np.empty_like(fa)
    for i in range(p):
        try:
            val = np.asarray(f(fa[i]), dtype=np.complex128)
        except (ValueError, ZeroDivisionError, FloatingPointError,
                np.linalg.LinAlgError) as exc:
            raise DomainError(f"evaluator failed on Fourier block {i + 1}: {exc}") from exc
        if val.shape != (n, n):
            raise ShapeError(
                f"evaluator returned shape {val.shape} on block {i + 1}, expected {(n, n)}"
            )
        if not np.all(np.isfinite(val)):
            raise DomainError(f"evaluator returned non-finite entries on block {i + 1}")
        out[i] = val
    return Tensor3(np.fft.ifft(out, axis=0))


def _radius_guard(a: Tensor3, radius: float, name: str) -> float:
    lam0 = t_eigenvalues(a).max_modulus()
    if lam0 >= radius:
        raise RadiusError(
            f"{name} requires max T-eigenvalue modulus < {radius:g}, got {lam0:.6g}",
            modulus=lam0,
        )
    return lam0


def named_tfunc(name: str, a: Tensor3, alpha: complex | None = None) -> Tensor3:
    """Named tensor functions.

    'exp', 'sin', 'cos' act on any F-square tensor; 'log1p' computes the
    principal log of (identity + a) and 'pow' computes
    (identity + a)^alpha, both requiring all T-eigenvalue moduli < 1.
    """
    if name not in _NAMED:
        raise ValueError(f"unknown function {name!r}, expected one of {_NAMED}")
    if name == "exp":
        return tfunc_apply(a, scipy.linalg.expm)
    if name == "sin":
        return tfunc_apply(a, scipy.linalg.sinm)
    if name == "cos":
        return tfunc_apply(a, scipy.linalg.cosm)

    _radius_guard(a, 1.0, name)
    eye = np.eye(a.n_rows, dtype=np.complex128)
    if name == "log1p":
        return tfunc_apply(a, lambda d: scipy.linalg.logm(eye + d, disp=False)[0])
    # pow: principal branch of (I + a)^alpha
    if alpha is None:
        raise ValueError("'pow' requires alpha")
    alpha = complex(alpha)
    return tfunc_apply(
        a,
        lambda d: scipy.linalg.expm(alpha * scipy.linalg.logm(eye + d, disp=False)[0]),
    )


@dataclass(frozen=True)
class SeriesResult:
    """Truncated power-series evaluation with a tail diagnostic.

    ``tail_bound`` is the geometric estimate |a_K| * lam0^K * r/(1-r)
    with r the coefficient decay ratio; ``max_modulus`` is the largest
    T-eigenvalue modulus the bound was computed from.
    """

    value: Tensor3
    tail_bound: float
    max_modulus: float


def series_eval(coeffs, radius: float, a: Tensor3, trunc: int) -> SeriesResult:
    """Evaluate sum_{k<=trunc} coeffs(k) * a^k by Horner's rule.

    ``coeffs`` is a callable k -> complex or a sequence of length at
    least trunc+1.  Raises RadiusError when the largest T-eigenvalue
    modulus reaches ``radius``.
    """
    if trunc < 0:
        raise ValueError(f"truncation order must be >= 0, got {trunc}")
    lam0 = _radius_guard(a, radius, "series_eval")
    if callable(coeffs):
        clist = [complex(coeffs(k)) for k in range(trunc + 1)]
    else:
        clist = [complex(c) for c in coeffs]
        if len(clist) < trunc + 1:
            raise ValueError(
                f"need {trunc + 1} coefficients for truncation {trunc}, got {len(clist)}"
            )
        clist = clist[:trunc + 1]
    value = tpoly_eval(clist, a)
    a_k = abs(clist[-1])
    if np.isinf(radius):
        ratio = lam0 / (trunc + 2)  # factorial-type decay proxy
    else:
        ratio = lam0 / radius
    if ratio < 1.0:
        tail = a_k * lam0 ** trunc * (ratio / (1.0 - ratio))
    else:  # pragma: no cover - radius guard keeps ratio < 1 for finite radius
        tail = float("inf")
    return SeriesResult(value=value, tail_bound=float(tail), max_modulus=lam0)


def series_coefficients(name: str, alpha: complex | None = None):
    """Coefficient generator and convergence radius for a named series.

    Returns (coeffs, radius) where coeffs(k) is the k-th Maclaurin
    coefficient of exp, sin, cos, log1p (log(1+x)) or pow ((1+x)^alpha).
    """
    if name == "exp":
        def coeffs(k):
            c = 1.0
            for j in range(1, k + 1):
                c /= j
            return c
        return coeffs, float("inf")
    if name == "sin":
        def coeffs(k):
            if k % 2 == 0:
                return 0.0
            c = 1.0
            for j in range(1, k + 1):
                c /= j
            return c * (-1.0) ** ((k - 1) // 2)
        return coeffs, float("inf")
    if name == "cos":
        def coeffs(k):
            if k % 2 == 1:
                return 0.0
            c = 1.0
            for j in range(1, k + 1):
                c /= j
            return c * (-1.0) ** (k // 2)
        return coeffs, float("inf")
    if name == "log1p":
        def coeffs(k):
            if k == 0:
                return 0.0
            return (-1.0) ** (k + 1) / k
        return coeffs, 1.0
    if name == "pow":
        if alpha is None:
            raise ValueError("'pow' requires alpha")
        al = complex(alpha)

        def coeffs(k):
            c = 1.0 + 0.0j
            for j in range(k):
                c *= (al - j) / (j + 1)
            return c
        return coeffs, 1.0
    raise ValueError(f"unknown series {name!r}, expected one of {_NAMED}")


def alpha_root(a: Tensor3, alpha: complex) -> Tensor3:
    """Principal alpha-th root exp((1/alpha) * log(a)) of an invertible
    F-square tensor.

    For positive integer alpha, tpow(alpha_root(a, alpha), alpha)
    recovers ``a`` up to the principal-branch choice.
    """
    if not a.is_f_square():
        raise ShapeError(f"alpha_root requires an F-square tensor, got {a.shape}")
    alpha = complex(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    fa = _fft_slices(a)
    _singular_check(fa, TOL_RANK, "alpha_root")

    def evaluator(d):
        logd = scipy.linalg.logm(d, disp=False)[0]
        return scipy.linalg.expm(logd / alpha)

    return tfunc_apply(a, evaluator)
