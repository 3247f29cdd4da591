"""Command-line front end.

Every operation works on tensor files in the JSON format of
save_tensor/load_tensor.  Results are written with --out (or the
subcommand's named output flags); --report writes a JSON report
{"residuals": {...}, "t_index": ..., "timings_ms": {...}} plus
subcommand-specific extras.  Exit codes: 0 success, 2 file/parse error,
3 shape mismatch, 4 singular/index/pivot violation, 5 radius/domain
violation, 6 ill-conditioned structure, 7 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from contextlib import nullcontext

import numpy as np

from . import oracle
from .algebra import tinv, tpow, tprod
from .core import (
    Tensor3,
    bcirc,
    conj_transpose,
    fro_norm,
    load_tensor,
    save_tensor,
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
    core_nilpotent,
    drazin_limit,
    t_drazin,
    t_group_inverse,
    t_index,
    t_moore_penrose,
    t_rank,
)
from .polyn import t_char_poly, t_min_poly
from .spectral import jordan_factorize, t_eigenvalues
from .tfunc import named_tfunc, series_coefficients, series_eval
from .transform import to_blocks

_EXIT_PARSE = 2
_EXIT_SHAPE = 3
_EXIT_SINGULAR = 4
_EXIT_DOMAIN = 5
_EXIT_ILLCOND = 6
_EXIT_VERIFY = 7

_ERROR_EXITS = (
    ((ShapeError, StructureError), _EXIT_SHAPE),
    ((SingularError, TIndexError, PivotError), _EXIT_SINGULAR),
    ((RadiusError, DomainError, NotHermitianError), _EXIT_DOMAIN),
    (
        (IllConditionedError, NotCommutingError, NotDiagonalizableError, ConvergenceError),
        _EXIT_ILLCOND,
    ),
)


def _thread_limit(threads):
    if threads is None:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=threads)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - t0) * 1e3


def _write_report(path, residuals=None, t_index=None, timings_ms=None, **extra):
    if path is None:
        return
    doc = {
        "residuals": residuals if residuals is not None else {},
        "t_index": t_index,
        "timings_ms": timings_ms if timings_ms is not None else {},
    }
    doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"), sort_keys=True)
        fh.write("\n")


def _parse_size(text: str) -> tuple[int, int, int]:
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise ValueError(f"--size must look like 4x4x3, got {text!r}")
    m, n, p = (int(v) for v in parts)
    if min(m, n, p) < 1:
        raise ValueError(f"--size dimensions must be positive, got {text!r}")
    return m, n, p


def _parse_zseq(text: str | None):
    if text is None:
        return None
    return tuple(float(v) for v in text.split(","))


def _random_tensor(rng, m, n, p) -> Tensor3:
    return Tensor3(
        rng.standard_normal((p, m, n)) + 1j * rng.standard_normal((p, m, n))
    )


# --- subcommand handlers --------------------------------------------------


def _cmd_tprod(args):
    c, ms = _timed(lambda: tprod(load_tensor(args.a), load_tensor(args.b)))
    save_tensor(c, args.out)
    _write_report(args.report, timings_ms={"tprod": ms})
    return 0


def _cmd_tinv(args):
    a = load_tensor(args.a)
    x, ms = _timed(lambda: tinv(a, tol=args.tol))
    save_tensor(x, args.out)
    _write_report(args.report, timings_ms={"tinv": ms})
    return 0


def _cmd_tpow(args):
    a = load_tensor(args.a)
    x, ms = _timed(lambda: tpow(a, args.k))
    save_tensor(x, args.out)
    _write_report(args.report, timings_ms={"tpow": ms})
    return 0


def _cmd_transpose(args):
    save_tensor(conj_transpose(load_tensor(args.a)), args.out)
    return 0


def _cmd_blocks(args):
    fb = to_blocks(load_tensor(args.a))
    save_tensor(Tensor3(fb.blocks), args.out)
    return 0


def _cmd_jordan(args):
    a = load_tensor(args.a)
    tj, ms = _timed(lambda: jordan_factorize(a))
    save_tensor(tj.p_tensor, args.out_p)
    save_tensor(tj.j_tensor, args.out_j)
    recon = tprod(tinv(tj.p_tensor), tprod(tj.j_tensor, tj.p_tensor))
    resid = fro_norm(recon - a) / max(fro_norm(a), 1e-300)
    structure = [
        [[ev.real, ev.imag, size] for ev, size in slice_blocks]
        for slice_blocks in tj.block_structure
    ]
    _write_report(
        args.report,
        residuals={"reconstruction": resid},
        timings_ms={"jordan": ms},
        block_structure=structure,
    )
    return 0


def _cmd_eig(args):
    vals = t_eigenvalues(load_tensor(args.a)).values
    doc = {"values": [[[z.real, z.imag] for z in row] for row in vals]}
    with open(args.out, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")
    return 0


def _cmd_func(args):
    a = load_tensor(args.a)
    x, ms = _timed(lambda: named_tfunc(args.name, a, alpha=args.alpha))
    save_tensor(x, args.out)
    _write_report(args.report, timings_ms={f"func:{args.name}": ms})
    return 0


def _cmd_series(args):
    a = load_tensor(args.a)
    coeffs, radius = series_coefficients(args.name, alpha=args.alpha)
    res, ms = _timed(lambda: series_eval(coeffs, radius, a, args.trunc))
    save_tensor(res.value, args.out)
    _write_report(
        args.report,
        residuals={"tail_bound": res.tail_bound},
        timings_ms={f"series:{args.name}": ms},
        max_modulus=res.max_modulus,
        trunc=args.trunc,
    )
    return 0


def _roots_doc(ms):
    return {
        "roots": [[r.real, r.imag, mult] for r, mult in ms.roots],
        "degree": ms.degree,
    }


def _cmd_charpoly(args):
    doc = _roots_doc(t_char_poly(load_tensor(args.a)))
    with open(args.out, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")
    return 0


def _cmd_minpoly(args):
    doc = _roots_doc(t_min_poly(load_tensor(args.a)))
    with open(args.out, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")
    return 0


def _cmd_qr(args):
    q, r = t_qr(load_tensor(args.a))
    save_tensor(q, args.out_q)
    save_tensor(r, args.out_r)
    return 0


def _cmd_lu(args):
    perm, low, up = t_lu(load_tensor(args.a), pivot=not args.no_pivot)
    if perm is not None and args.out_perm:
        save_tensor(perm, args.out_perm)
    save_tensor(low, args.out_l)
    save_tensor(up, args.out_u)
    return 0


def _cmd_polar(args):
    u, h = t_polar(load_tensor(args.a))
    save_tensor(u, args.out_u)
    save_tensor(h, args.out_h)
    return 0


def _cmd_schur(args):
    q, t = t_schur(load_tensor(args.a))
    save_tensor(q, args.out_q)
    save_tensor(t, args.out_t)
    return 0


def _cmd_posdef(args):
    kind = is_t_positive_definite(load_tensor(args.a), tol=args.tol)
    print(kind)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"classification": kind}, fh, separators=(",", ":"))
            fh.write("\n")
    return 0


def _cmd_pinv(args):
    a = load_tensor(args.a)
    rep, ms = _timed(lambda: t_moore_penrose(a, tol=args.tol))
    save_tensor(rep.inverse, args.out)
    _write_report(args.report, residuals=rep.residuals, t_index=rep.t_index,
                  timings_ms={"pinv": ms})
    return 0


def _cmd_group(args):
    a = load_tensor(args.a)
    rep, ms = _timed(lambda: t_group_inverse(a))
    save_tensor(rep.inverse, args.out)
    _write_report(args.report, residuals=rep.residuals, t_index=rep.t_index,
                  timings_ms={"group": ms})
    return 0


def _cmd_drazin(args):
    a = load_tensor(args.a)
    rep, ms = _timed(lambda: t_drazin(a, cross_check=args.cross_check))
    save_tensor(rep.inverse, args.out)
    _write_report(args.report, residuals=rep.residuals, t_index=rep.t_index,
                  timings_ms={"drazin": ms})
    return 0


def _cmd_index(args):
    k = t_index(load_tensor(args.a), tol=args.tol)
    print(k)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"t_index": k}, fh, separators=(",", ":"))
            fh.write("\n")
    return 0


def _cmd_rank(args):
    r = t_rank(load_tensor(args.a), tol=args.tol)
    print(r)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"t_rank": r}, fh, separators=(",", ":"))
            fh.write("\n")
    return 0


def _cmd_corenil(args):
    a = load_tensor(args.a)
    cn, ms = _timed(lambda: core_nilpotent(a))
    save_tensor(cn.core, args.out_core)
    save_tensor(cn.nilpotent, args.out_nil)
    _write_report(args.report, t_index=cn.t_index, timings_ms={"corenil": ms})
    return 0


def _cmd_limit(args):
    a = load_tensor(args.a)
    (est, errors), ms = _timed(
        lambda: drazin_limit(a, l=args.l, z_sequence=_parse_zseq(args.z_seq))
    )
    save_tensor(est, args.out)
    _write_report(
        args.report,
        t_index=t_index(a),
        timings_ms={"limit": ms},
        errors_per_z=errors,
    )
    return 0


# --- verification and benchmarking ---------------------------------------


def _eig_multiset_gap(a: Tensor3) -> float:
    """Worst matching distance between the fast-path T-eigenvalues and
    the spectrum of the dense block-circulant embedding."""
    fast = sorted(
        (complex(z) for z in t_eigenvalues(a).values.ravel()),
        key=lambda z: (z.real, z.imag),
    )
    dense = np.linalg.eigvals(bcirc(a))
    scale = max(float(np.max(np.abs(dense))), 1e-300)
    used = [False] * len(fast)
    worst = 0.0
    for lam in dense:
        best_i, best_d = -1, float("inf")
        for i, mu in enumerate(fast):
            if used[i]:
                continue
            d = abs(lam - mu)
            if d < best_d:
                best_i, best_d = i, d
        used[best_i] = True
        worst = max(worst, best_d / scale)
    return worst


def run_verify(m: int, n: int, p: int, trials: int, seed, tol: float | None):
    """Fast-path vs dense-oracle comparisons.  Returns (lines, ok)."""
    import scipy.linalg

    rng = np.random.default_rng(seed)
    tol = 1e-8 if tol is None else tol
    worst: dict[str, float] = {}

    def note(name, value):
        worst[name] = max(worst.get(name, 0.0), value)

    for _ in range(trials):
        a = _random_tensor(rng, m, n, p)
        b = _random_tensor(rng, n, m, p)
        prod_gap = fro_norm(tprod(a, b) - oracle.dense_tprod(a, b))
        note("tprod_vs_dense", prod_gap / max(fro_norm(a) * fro_norm(b), 1e-300))

        pinv_rep = t_moore_penrose(a)
        note("pinv_residuals", max(pinv_rep.residuals.values()))

        if m == n:
            sq = tprod(a, a)
            note(
                "tfunc_square_vs_dense",
                fro_norm(sq - oracle.dense_tfunc(a, lambda mat: mat @ mat))
                / max(fro_norm(sq), 1e-300),
            )
            ex = named_tfunc("exp", a)
            note(
                "tfunc_exp_vs_dense",
                fro_norm(ex - oracle.dense_tfunc(a, scipy.linalg.expm))
                / max(fro_norm(ex), 1e-300),
            )
            dz = t_drazin(a).inverse
            note(
                "drazin_vs_dense",
                fro_norm(dz - oracle.dense_drazin(a)) / max(fro_norm(dz), 1e-300),
            )
            note("eig_vs_bcirc_spectrum", _eig_multiset_gap(a))

    lines = []
    ok = True
    for name in sorted(worst):
        passed = worst[name] <= tol
        ok = ok and passed
        lines.append(f"{name}: worst {worst[name]:.3e} {'PASS' if passed else 'FAIL'}")
    lines.append(f"verify: {'PASS' if ok else 'FAIL'} ({trials} trials, size {m}x{n}x{p})")
    return lines, ok


def _cmd_verify(args):
    m, n, p = _parse_size(args.size)
    lines, ok = run_verify(m, n, p, args.trials, args.seed, args.tol)
    for line in lines:
        print(line)
    return 0 if ok else _EXIT_VERIFY


def bench_rows(n: int, p: int, trials: int, seed):
    """Times the Fourier fast path against the dense definitional path.

    Operands are real-valued (the common case for this algebra); both
    paths see identical complex128 tensors.  Each path gets one warmup
    call, then best-of-``trials`` wall-clock milliseconds is reported.
    """
    rng = np.random.default_rng(seed)
    a = Tensor3(rng.standard_normal((p, n, n)))
    b = Tensor3(rng.standard_normal((p, n, n)))
    tprod(a, b)
    oracle.dense_tprod(a, b)
    fast = min(_timed(lambda: tprod(a, b))[1] for _ in range(trials))
    dense = min(_timed(lambda: oracle.dense_tprod(a, b))[1] for _ in range(trials))
    return [
        ("tprod", n, p, "fast", fast),
        ("tprod", n, p, "dense", dense),
    ]


def _cmd_bench(args):
    m, n, p = _parse_size(args.size)
    if m != n:
        raise ValueError(f"bench needs an F-square size like 32x32x64, got {args.size}")
    rows = bench_rows(n, p, args.trials, args.seed)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["op", "n", "p", "path", "ms"])
        for op, rn, rp, path, ms in rows:
            writer.writerow([op, rn, rp, path, f"{ms:.3f}"])
    finally:
        if args.out:
            out.close()
    return 0


# --- parser ---------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttool",
        description="Tensor t-product toolbox operating on JSON tensor files.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="cap BLAS/FFT threads (default: library choice)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, helptext, *, a=True, out=False, report=False, tol=False):
        sp = sub.add_parser(name, help=helptext)
        if a:
            sp.add_argument("--a", required=True, help="input tensor file")
        if out:
            sp.add_argument("--out", required=True, help="output file")
        if report:
            sp.add_argument("--report", default=None, help="JSON report file")
        if tol:
            sp.add_argument("--tol", type=float, default=None,
                            help="tolerance override")
        sp.set_defaults(func=handler)
        return sp

    sp = add("tprod", _cmd_tprod, "t-product of two tensors", out=True, report=True)
    sp.add_argument("--b", required=True, help="right factor tensor file")

    add("tinv", _cmd_tinv, "t-product inverse", out=True, report=True, tol=True)

    sp = add("tpow", _cmd_tpow, "nonnegative t-product power", out=True, report=True)
    sp.add_argument("--k", type=int, required=True)

    add("transpose", _cmd_transpose, "conjugate transpose", out=True)
    add("blocks", _cmd_blocks, "Fourier blocks as tensor slices", out=True)

    sp = add("jordan", _cmd_jordan, "Jordan factorization", report=True)
    sp.add_argument("--out-p", required=True, help="transform tensor output")
    sp.add_argument("--out-j", required=True, help="Jordan tensor output")

    add("eig", _cmd_eig, "T-eigenvalues per Fourier slice (JSON)", out=True)

    sp = add("func", _cmd_func, "named tensor function", out=True, report=True)
    sp.add_argument("--name", required=True,
                    choices=["exp", "sin", "cos", "log1p", "pow"])
    sp.add_argument("--alpha", type=float, default=None)

    sp = add("series", _cmd_series, "truncated power series", out=True, report=True)
    sp.add_argument("--name", required=True,
                    choices=["exp", "sin", "cos", "log1p", "pow"])
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--trunc", type=int, default=25)

    add("charpoly", _cmd_charpoly, "characteristic root multiset (JSON)", out=True)
    add("minpoly", _cmd_minpoly, "minimal root multiset (JSON)", out=True)

    sp = add("qr", _cmd_qr, "QR factorization")
    sp.add_argument("--out-q", required=True)
    sp.add_argument("--out-r", required=True)

    sp = add("lu", _cmd_lu, "LU factorization")
    sp.add_argument("--no-pivot", action="store_true")
    sp.add_argument("--out-perm", default=None)
    sp.add_argument("--out-l", required=True)
    sp.add_argument("--out-u", required=True)

    sp = add("polar", _cmd_polar, "polar factorization")
    sp.add_argument("--out-u", required=True)
    sp.add_argument("--out-h", required=True)

    sp = add("schur", _cmd_schur, "Schur factorization")
    sp.add_argument("--out-q", required=True)
    sp.add_argument("--out-t", required=True)

    sp = add("posdef", _cmd_posdef, "positive definiteness class", tol=True)
    sp.add_argument("--out", default=None)

    add("pinv", _cmd_pinv, "Moore-Penrose inverse", out=True, report=True, tol=True)
    add("group", _cmd_group, "group inverse", out=True, report=True)

    sp = add("drazin", _cmd_drazin, "Drazin inverse", out=True, report=True)
    sp.add_argument("--cross-check", action="store_true",
                    help="also run the resolvent-free formula and compare")

    sp = add("index", _cmd_index, "T-index", tol=True)
    sp.add_argument("--out", default=None)

    sp = add("rank", _cmd_rank, "T-rank", tol=True)
    sp.add_argument("--out", default=None)

    sp = add("corenil", _cmd_corenil, "core-nilpotent split", report=True)
    sp.add_argument("--out-core", required=True)
    sp.add_argument("--out-nil", required=True)

    sp = add("limit", _cmd_limit, "Drazin resolvent limit", out=True, report=True)
    sp.add_argument("--l", type=int, default=None)
    sp.add_argument("--z-seq", default=None, help="comma-separated decreasing z values")

    sp = add("verify", _cmd_verify, "fast path vs dense oracle", a=False, tol=True)
    sp.add_argument("--size", required=True, help="tensor size, e.g. 4x4x3")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("bench", _cmd_bench, "time fast vs dense paths (CSV)", a=False)
    sp.add_argument("--size", required=True, help="F-square size, e.g. 32x32x64")
    sp.add_argument("--trials", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)

    return parser


def run(argv=None) -> int:
    """Parse arguments, dispatch, and map errors to exit codes."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        with _thread_limit(args.threads):
            return args.func(args)
    except TensorError as exc:
        print(f"ttool: {exc}", file=sys.stderr)
        for errs, code in _ERROR_EXITS:
            if isinstance(exc, errs):
                return code
        return _EXIT_ILLCOND
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"ttool: {exc}", file=sys.stderr)
        return _EXIT_PARSE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
