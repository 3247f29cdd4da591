"""Fourier block diagonalization of the block-circulant embedding.

For an F-square tensor ``a`` (n x n x p), conjugating ``bcirc(a)`` by
the unitary DFT matrix kron(F_p, I_n) yields a block-diagonal matrix.
``to_blocks`` returns those p diagonal blocks via an unnormalized
forward DFT along tubes (omega = exp(-2*pi*i/p)); ``from_blocks``
inverts it, carrying the 1/p factor.
"""

from __future__ import annotations

import numpy as np

from .core import Tensor3
from .errors import ShapeError


class FourierBlocks:
    """The p Fourier-domain n x n blocks of an F-square tensor.

    ``blocks`` is a read-only (p, n, n) array; block i is the image of
    the tensor at the i-th DFT frequency.
    """

    __slots__ = ("_blocks",)

    def __init__(self, blocks):
        arr = np.array(blocks, dtype=np.complex128, copy=True, order="C")
        if arr.ndim != 3:
            raise ShapeError(f"expected a stack of blocks, got ndim={arr.ndim}")
        if arr.shape[1] != arr.shape[2]:
            raise ShapeError(f"Fourier blocks must be square, got {arr.shape[1:]}")
        arr.flags.writeable = False
        self._blocks = arr

    @property
    def blocks(self) -> np.ndarray:
        return self._blocks

    @property
    def n(self) -> int:
        return self._blocks.shape[1]

    @property
    def p(self) -> int:
        return self._blocks.shape[0]

    def block(self, i: int) -> np.ndarray:
        """Block at frequency i (0-based)."""
        return self._blocks[i]

    def __repr__(self):
        return f"FourierBlocks(n={self.n}, p={self.p})"


def to_blocks(a: Tensor3) -> FourierBlocks:
    """Forward DFT along tubes of an F-square tensor.

    Block i equals sum_k a_slice(k) * omega^(i*k) with
    omega = exp(-2*pi*i/p), which is exactly the i-th diagonal block of
    kron(F_p, I_n) @ bcirc(a) @ kron(F_p, I_n)^H.
    """
    if not a.is_f_square():
        raise ShapeError(f"to_blocks requires an F-square tensor, got {a.shape}")
    return FourierBlocks(np.fft.fft(a.data, axis=0))


def from_blocks(blocks: FourierBlocks) -> Tensor3:
    """Inverse DFT along frequencies; exact inverse of ``to_blocks``."""
    return Tensor3(np.fft.ifft(blocks.blocks, axis=0))


def phase_combine(blocks: FourierBlocks, k: int) -> np.ndarray:
    """Recover frontal slice ``k`` (1-based) from Fourier blocks directly.

    Evaluates (1/p) * sum_i omega^{-(k-1)(i-1)} D_i with an explicit
    Vandermonde sum, independent of the FFT kernel.  Must agree with
    slice ``k`` of ``from_blocks(blocks)``; used as a cross-check of the
    transform convention.
    """
    p = blocks.p
    if not 1 <= k <= p:
        raise IndexError(f"slice index must be in 1..{p}, got {k}")
    acc = np.zeros((blocks.n, blocks.n), dtype=np.complex128)
    for i in range(p):
        # omega^{-(k-1)(i-1)} with omega = exp(-2*pi*i/p), 0-based i
        w = np.exp(2j * np.pi * ((k - 1) * i) / p)
        acc += w * blocks.block(i)
    return acc / p


def unitary_dft(p: int) -> np.ndarray:
    """Unitary DFT matrix F_p with F[j, k] = omega^{jk} / sqrt(p)."""
    j = np.arange(p)
    return np.exp(-2j * np.pi * np.outer(j, j) / p) / np.sqrt(p)
