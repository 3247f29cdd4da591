"""Shared fixture builders.

Planted-structure builders go through jordan_synthesize so the ground
truth is known by construction; transform tensors are built with
controlled per-block conditioning.
"""

import numpy as np

from ttool import Tensor3, jordan_synthesize

# well-separated complex centers (lattice step 0.75, includes 0)
CENTER_LATTICE = [
    complex(re, im)
    for re in (-1.5, -0.75, 0.0, 0.75, 1.5)
    for im in (-0.75, 0.0, 0.75)
]


def rand_tensor(rng, m, n, p, real=False):
    re = rng.standard_normal((p, m, n))
    if real:
        return Tensor3(re)
    return Tensor3(re + 1j * rng.standard_normal((p, m, n)))


def rand_unitary(rng, n):
    q, r = np.linalg.qr(
        rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    )
    d = np.diag(r)
    return q * (d / np.abs(d))


def rand_p_tensor(rng, n, p, spread=4.0):
    """Invertible transform tensor; every Fourier block has condition
    number exactly ``spread``."""
    blocks = np.empty((p, n, n), dtype=np.complex128)
    sv = np.linspace(1.0, float(spread), n) if n > 1 else np.ones(1)
    for i in range(p):
        blocks[i] = (rand_unitary(rng, n) * sv) @ rand_unitary(rng, n)
    return Tensor3(np.fft.ifft(blocks, axis=0))


def random_partition(rng, n, max_size):
    sizes = []
    left = n
    while left > 0:
        s = int(rng.integers(1, min(max_size, left) + 1))
        sizes.append(s)
        left -= s
    return sizes


def plant_structure(rng, n, p, max_size=3, centers=None, include_zero=False):
    """Per-slice (eigenvalue, size) lists with separated centers."""
    palette = list(CENTER_LATTICE if centers is None else centers)
    structure = []
    for i in range(p):
        sizes = random_partition(rng, n, max_size)
        picks = rng.choice(len(palette), size=len(sizes), replace=True)
        slice_struct = [(palette[j], s) for j, s in zip(picks, sizes)]
        if include_zero and i == 0:
            slice_struct[0] = (0.0 + 0.0j, slice_struct[0][1])
        structure.append(slice_struct)
    return structure


def plant_jordan(rng, n, p, max_size=3, spread=4.0, centers=None,
                 include_zero=False):
    """Returns (tensor, structure, p_tensor) with known Jordan data."""
    structure = plant_structure(
        rng, n, p, max_size=max_size, centers=centers, include_zero=include_zero
    )
    pt = rand_p_tensor(rng, n, p, spread=spread)
    return jordan_synthesize(structure, pt), structure, pt


def plant_index(rng, n, p, k, max_size=3, spread=3.0, moduli=(0.4, 1.2)):
    """Tensor with T-index exactly k: one zero Jordan block of size k is
    planted (none for k=0), all other centers have modulus in ``moduli``."""
    def nonzero_center():
        r = rng.uniform(*moduli)
        return r * np.exp(2j * np.pi * rng.uniform())

    structure = []
    for i in range(p):
        sizes = random_partition(rng, n, max_size)
        slice_struct = [(nonzero_center(), s) for s in sizes]
        if k > 0 and i == 0:
            # force the max zero-block size to be exactly k
            placed = False
            for j, s in enumerate(sizes):
                if s == k:
                    slice_struct[j] = (0.0 + 0.0j, k)
                    placed = True
                    break
            if not placed:
                slice_struct = [(0.0 + 0.0j, k)] + [
                    (nonzero_center(), s)
                    for s in random_partition(rng, n - k, max_size)
                ]
        elif k > 0 and rng.uniform() < 0.5:
            # optional smaller zero blocks elsewhere
            small = int(rng.integers(1, k + 1))
            for j, s in enumerate(sizes):
                if s == small:
                    slice_struct[j] = (0.0 + 0.0j, small)
                    break
        structure.append(slice_struct)
    pt = rand_p_tensor(rng, n, p, spread=spread)
    return jordan_synthesize(structure, pt), structure


def max_zero_size(structure, tol=1e-12):
    worst = 0
    for slice_struct in structure:
        for lam, size in slice_struct:
            if abs(lam) <= tol:
                worst = max(worst, size)
    return worst


def plant_nilpotent(rng, n, p, k, spread=2.0):
    """Nilpotent tensor of index exactly k (k <= n)."""
    structure = []
    for i in range(p):
        sizes = [k] if i == 0 else random_partition(rng, min(n, k), k)
        left = n - sum(sizes)
        while left > 0:
            s = int(rng.integers(1, min(k, left) + 1))
            sizes.append(s)
            left -= s
        structure.append([(0.0 + 0.0j, s) for s in sizes])
    pt = rand_p_tensor(rng, n, p, spread=spread)
    return jordan_synthesize(structure, pt)


def rand_ep(rng, n, p, rank):
    """Range-Hermitian fixture: unitary * (invertible diag + zeros) * unitary^H
    per Fourier block."""
    blocks = np.empty((p, n, n), dtype=np.complex128)
    for i in range(p):
        u = rand_unitary(rng, n)
        d = np.zeros(n, dtype=np.complex128)
        d[:rank] = rng.uniform(0.5, 2.0, rank) * np.exp(
            2j * np.pi * rng.uniform(size=rank)
        )
        blocks[i] = (u * d) @ u.conj().T
    return Tensor3(np.fft.ifft(blocks, axis=0))


def rand_non_ep(rng, n, p, rank, shear=2.0):
    """Index-1 but not range-Hermitian: same eigenstructure conjugated by
    a strong shear instead of a unitary."""
    blocks = np.empty((p, n, n), dtype=np.complex128)
    for i in range(p):
        s = np.eye(n, dtype=np.complex128)
        iu = np.triu_indices(n, 1)
        s[iu] = shear * (rng.standard_normal(len(iu[0]))
                         + 1j * rng.standard_normal(len(iu[0])))
        d = np.zeros(n, dtype=np.complex128)
        d[:rank] = rng.uniform(0.5, 2.0, rank) * np.exp(
            2j * np.pi * rng.uniform(size=rank)
        )
        blocks[i] = (s * d) @ np.linalg.inv(s)
    return Tensor3(np.fft.ifft(blocks, axis=0))


def snap_structure(structure, centers, tol=0.25):
    """Canonicalize a per-slice (eigenvalue, size) structure by snapping
    each eigenvalue to its nearest center (must land within tol) and
    sorting.  Lets recovered structures be compared to planted ones."""
    centers = np.asarray(list(centers), dtype=np.complex128)
    out = []
    for slice_struct in structure:
        canon = []
        for lam, size in slice_struct:
            dist = np.abs(centers - complex(lam))
            j = int(np.argmin(dist))
            assert dist[j] <= tol, f"eigenvalue {lam} is {dist[j]} from any center"
            canon.append((centers[j].real, centers[j].imag, int(size)))
        out.append(sorted(canon))
    return out


def scaled_to_modulus(a, target):
    """Rescale so the largest T-eigenvalue modulus equals target."""
    from ttool import t_eigenvalues

    lam0 = t_eigenvalues(a).max_modulus()
    if lam0 == 0.0:
        return a
    return a * (target / lam0)
