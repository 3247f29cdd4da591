"""Eigenvalues, T-Jordan factorization, nilpotency, commuting families."""

import numpy as np
import pytest

from ttool import (
    IllConditionedError,
    NotCommutingError,
    NotDiagonalizableError,
    ShapeError,
    Tensor3,
    fro_norm,
    identity_tensor,
    is_f_diagonalizable,
    jordan_factorize,
    jordan_synthesize,
    nilpotency,
    simultaneous_diagonalize,
    t_eigenvalues,
    tinv,
    tpoly_eval,
    tprod,
)
from ttool.transform import to_blocks

from helpers import (
    CENTER_LATTICE,
    plant_jordan,
    plant_nilpotent,
    rand_p_tensor,
    rand_tensor,
    snap_structure,
)


def t112(first, second):
    return Tensor3([[[first]], [[second]]])


J2 = Tensor3(np.array([[[0.0, 1.0], [0.0, 0.0]]]))


class TestTEigenvalues:
    def test_tube_example(self):
        ev = t_eigenvalues(t112(1, -1))
        assert np.allclose(ev.per_slice(0), [0])
        assert np.allclose(ev.per_slice(1), [2])
        assert ev.max_modulus() == pytest.approx(2.0)
        assert sorted(np.real(ev.flat())) == pytest.approx([0.0, 2.0])

    def test_counts_and_sorting(self, rng):
        a = rand_tensor(rng, 4, 4, 3)
        ev = t_eigenvalues(a)
        assert ev.values.shape == (3, 4)
        assert ev.flat().shape == (12,)
        for i in range(3):
            row = ev.per_slice(i)
            key = list(zip(row.real, row.imag))
            assert key == sorted(key)

    def test_matches_planted_centers(self, rng):
        a, structure, _ = plant_jordan(rng, 5, 3)
        ev = t_eigenvalues(a)
        for i, slice_struct in enumerate(structure):
            want = [
                complex(lam) for lam, size in slice_struct for _ in range(size)
            ]
            got = list(ev.per_slice(i))
            # defective eigenvalues split like eps**(1/size) under
            # rounding, so pair greedily instead of sorting
            for w in want:
                j = int(np.argmin(np.abs(np.array(got) - w)))
                assert abs(got[j] - w) < 1e-3
                got.pop(j)
            assert not got

    def test_requires_f_square(self):
        with pytest.raises(ShapeError):
            t_eigenvalues(Tensor3(np.zeros((2, 2, 3))))


def exact_jordan_blocks(j_tensor, structure):
    """Assert every Fourier slice of j_tensor is the exact Jordan matrix
    announced by structure (same order)."""
    fb = to_blocks(j_tensor)
    for i, slice_struct in enumerate(structure):
        want = np.zeros((j_tensor.n_rows, j_tensor.n_rows), dtype=complex)
        pos = 0
        for lam, size in slice_struct:
            for r in range(size):
                want[pos + r, pos + r] = lam
                if r + 1 < size:
                    want[pos + r, pos + r + 1] = 1.0
            pos += size
        np.testing.assert_allclose(fb.block(i), want, atol=1e-8)


class TestJordanFactorize:
    def test_planted_structure_recovered(self, rng):
        for n in (3, 4, 5):
            a, structure, _ = plant_jordan(rng, n, 3)
            jd = jordan_factorize(a)
            assert snap_structure(jd.block_structure, CENTER_LATTICE) == \
                snap_structure(structure, CENTER_LATTICE)

    def test_reconstruction(self, rng):
        a, _, _ = plant_jordan(rng, 4, 3)
        jd = jordan_factorize(a)
        back = tprod(tinv(jd.p_tensor), tprod(jd.j_tensor, jd.p_tensor))
        np.testing.assert_allclose(back.data, a.data, atol=1e-8)

    def test_j_blocks_are_exact_jordan(self, rng):
        a, _, _ = plant_jordan(rng, 4, 2)
        jd = jordan_factorize(a)
        exact_jordan_blocks(jd.j_tensor, jd.block_structure)

    def test_identity(self):
        jd = jordan_factorize(identity_tensor(3, 2))
        for slice_struct in jd.block_structure:
            assert all(size == 1 and abs(lam - 1) < 1e-12
                       for lam, size in slice_struct)

    def test_single_nilpotent_block(self):
        jd = jordan_factorize(J2)
        assert jd.block_structure == [[(0j, 2)]]

    def test_near_degenerate_spectrum_refused(self):
        # two eigenvalues separated by 1.5e-3: inside the cluster-quality
        # gray zone at the default clustering tolerance
        a = Tensor3(np.diag([1.0, 1.0 + 1.5e-3])[None, :, :])
        with pytest.raises(IllConditionedError):
            jordan_factorize(a)

    def test_tight_cluster_collapses(self):
        # 1e-9 apart: treated as one eigenvalue, giving a 2-chain or a
        # pair of 1-blocks at the merged center, never an error
        a = Tensor3(np.diag([1.0, 1.0 + 1e-9])[None, :, :])
        jd = jordan_factorize(a)
        assert sum(size for _, size in jd.block_structure[0]) == 2
        for lam, _ in jd.block_structure[0]:
            assert abs(lam - 1.0) < 1e-6


class TestJordanSynthesize:
    def test_round_trip_with_factorize(self, rng):
        structure = [[(1.5, 2), (-0.75 + 0.75j, 1)],
                     [(0.0, 1), (0.75, 2)]]
        pt = rand_p_tensor(rng, 3, 2)
        a = jordan_synthesize(structure, pt)
        jd = jordan_factorize(a)
        assert snap_structure(jd.block_structure, CENTER_LATTICE) == \
            snap_structure(structure, CENTER_LATTICE)

    def test_validates_sizes(self, rng):
        pt = rand_p_tensor(rng, 3, 2)
        with pytest.raises(ShapeError):
            jordan_synthesize([[(1.0, 2)], [(1.0, 3)]], pt)
        with pytest.raises(ShapeError):
            jordan_synthesize([[(1.0, 3)]], pt)


def test_is_f_diagonalizable(rng):
    a, _, _ = plant_jordan(rng, 4, 2, max_size=1)
    assert is_f_diagonalizable(a)
    assert not is_f_diagonalizable(J2)
    assert is_f_diagonalizable(identity_tensor(3, 4))


class TestNilpotency:
    def test_non_nilpotent(self):
        assert nilpotency(identity_tensor(2, 3)) is None
        assert nilpotency(t112(1, -1)) is None

    def test_zero_tensor(self):
        assert nilpotency(Tensor3(np.zeros((3, 2, 2)))) == 1

    def test_shift_block(self):
        assert nilpotency(J2) == 2

    def test_planted_indices(self, rng):
        for k in (1, 2, 3):
            a = plant_nilpotent(rng, 4, 3, k)
            assert nilpotency(a) == k


class TestSimultaneousDiagonalize:
    def test_polynomial_family(self, rng):
        a, _, _ = plant_jordan(rng, 4, 2, max_size=1)
        b = tpoly_eval([1.0, 0.5, 0.25], a)
        pt, diags = simultaneous_diagonalize([a, b])
        for member, d in zip([a, b], diags):
            fb = to_blocks(d)
            for i in range(d.n_slices):
                block = fb.block(i)
                off = block - np.diag(np.diag(block))
                assert np.max(np.abs(off)) < 1e-9
            back = tprod(tinv(pt), tprod(d, pt))
            np.testing.assert_allclose(back.data, member.data, atol=1e-7)

    def test_rejects_non_commuting(self, rng):
        a = rand_tensor(rng, 3, 3, 2)
        b = rand_tensor(rng, 3, 3, 2)
        assert fro_norm(tprod(a, b) - tprod(b, a)) > 1e-3
        with pytest.raises(NotCommutingError):
            simultaneous_diagonalize([a, b])

    def test_rejects_defective(self):
        with pytest.raises(NotDiagonalizableError):
            simultaneous_diagonalize([J2, identity_tensor(2, 1)])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            simultaneous_diagonalize([])
