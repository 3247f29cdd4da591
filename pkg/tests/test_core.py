"""Tensor value type, block-circulant embedding, file format."""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ttool import (
    ShapeError,
    StructureError,
    Tensor3,
    bcirc,
    bcirc_inv,
    conj_transpose,
    fold,
    fro_norm,
    identity_tensor,
    load_tensor,
    save_tensor,
    tprod,
    unfold,
)

from helpers import rand_tensor


def t112(first, second):
    return Tensor3([[[first]], [[second]]])


class TestTensor3:
    def test_shape_convention(self):
        a = Tensor3(np.zeros((4, 2, 3)))
        assert a.shape == (2, 3, 4)
        assert (a.n_rows, a.n_cols, a.n_slices) == (2, 3, 4)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ShapeError):
            Tensor3(np.zeros((2, 2)))
        with pytest.raises(ShapeError):
            Tensor3(np.zeros((0, 2, 2)))
        with pytest.raises(ValueError):
            Tensor3([[[np.nan]]])
        with pytest.raises(ValueError):
            Tensor3([[[np.inf]]])

    def test_data_read_only(self):
        a = Tensor3(np.ones((2, 2, 2)))
        with pytest.raises(ValueError):
            a.data[0, 0, 0] = 5.0

    def test_arithmetic(self):
        a = t112(1, 2)
        b = t112(3, -1)
        assert np.allclose((a + b).data.ravel(), [4, 1])
        assert np.allclose((a - b).data.ravel(), [-2, 3])
        assert np.allclose((-a).data.ravel(), [-1, -2])
        assert np.allclose((2 * a).data.ravel(), [2, 4])
        with pytest.raises(TypeError):
            a * b
        with pytest.raises(ShapeError):
            a + Tensor3(np.ones((3, 1, 1)))

    def test_is_real_flag(self):
        assert Tensor3(np.ones((2, 1, 1))).is_real
        assert not Tensor3(1j * np.ones((2, 1, 1))).is_real


class TestBcirc:
    def test_1x1x2_pattern(self):
        assert np.array_equal(bcirc(t112(1, 2)), [[1, 2], [2, 1]])

    def test_identity_embeds_to_identity(self):
        assert np.array_equal(bcirc(identity_tensor(2, 3)), np.eye(6))

    def test_1x1x3_circulant(self):
        a = Tensor3([[[1]], [[2]], [[3]]])
        want = [[1, 3, 2], [2, 1, 3], [3, 2, 1]]
        assert np.array_equal(bcirc(a), want)

    def test_bcirc_inv_round_trip(self, rng):
        a = rand_tensor(rng, 3, 2, 4)
        back = bcirc_inv(bcirc(a), 3, 2, 4)
        assert np.array_equal(back.data, a.data)

    def test_bcirc_inv_literal(self):
        assert np.allclose(bcirc_inv([[1, 2], [2, 1]], 1, 1, 2).data.ravel(), [1, 2])
        back = bcirc_inv(np.eye(6), 2, 2, 3)
        assert np.array_equal(back.data, identity_tensor(2, 3).data)

    def test_bcirc_inv_rejects_non_circulant(self):
        with pytest.raises(StructureError):
            bcirc_inv([[1, 0], [1, 1]], 1, 1, 2)


class TestFoldUnfold:
    def test_column_stack(self):
        assert np.array_equal(unfold(t112(1, 2)), [[1], [2]])

    def test_identity_unfold(self):
        got = unfold(identity_tensor(2, 3))
        want = np.vstack([np.eye(2), np.zeros((4, 2))])
        assert np.array_equal(got, want)

    def test_round_trip(self, rng):
        a = rand_tensor(rng, 3, 2, 4)
        assert np.array_equal(fold(unfold(a), 4).data, a.data)

    def test_fold_rejects_indivisible(self):
        with pytest.raises(ShapeError):
            fold(np.zeros((5, 2)), 2)


class TestConjTranspose:
    def test_real_1x1x2_fixed(self):
        assert np.allclose(conj_transpose(t112(1, 2)).data.ravel(), [1, 2])

    def test_conjugate_and_reverse_tail(self):
        a = Tensor3([[[1j]], [[2]], [[3]]])
        assert np.allclose(conj_transpose(a).data.ravel(), [-1j, 3, 2])

    def test_matches_matrix_adjoint_exactly(self, rng):
        a = rand_tensor(rng, 2, 3, 4)
        assert np.array_equal(bcirc(conj_transpose(a)), bcirc(a).conj().T)

    def test_involution(self, rng):
        a = rand_tensor(rng, 2, 3, 4)
        assert np.array_equal(conj_transpose(conj_transpose(a)).data, a.data)


class TestFroNorm:
    def test_zero(self):
        assert fro_norm(Tensor3(np.zeros((3, 2, 2)))) == 0.0

    def test_identity(self):
        assert fro_norm(identity_tensor(2, 3)) == pytest.approx(np.sqrt(6))

    def test_1x1x2_explicit(self):
        # bcirc [[3,4],[4,3]] has Frobenius norm sqrt(50)
        assert fro_norm(t112(3, 4)) == pytest.approx(np.sqrt(50))

    def test_adjoint_invariance(self, rng):
        a = rand_tensor(rng, 2, 3, 4)
        assert fro_norm(conj_transpose(a)) == pytest.approx(fro_norm(a))


def test_identity_law(rng):
    a = rand_tensor(rng, 2, 3, 4)
    assert np.allclose(tprod(a, identity_tensor(3, 4)).data, a.data, atol=1e-13)
    assert np.allclose(tprod(identity_tensor(2, 4), a).data, a.data, atol=1e-13)


class TestFileFormat:
    def test_round_trip(self, tmp_path, rng):
        a = rand_tensor(rng, 3, 2, 4)
        path = tmp_path / "t.json"
        save_tensor(a, path)
        assert np.array_equal(load_tensor(path).data, a.data)

    def test_schema(self, tmp_path):
        path = tmp_path / "t.json"
        save_tensor(t112(1, 2), path)
        doc = json.loads(path.read_text())
        assert doc["shape"] == [1, 1, 2]
        assert doc["data"] == [[1.0, 0.0], [2.0, 0.0]]

    def test_rejects_wrong_length(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"shape": [1, 1, 2], "data": [[1.0, 0.0]]}')
        with pytest.raises(ValueError):
            load_tensor(path)

    def test_rejects_nonfinite(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"shape": [1, 1, 1], "data": [[NaN, 0.0]]}')
        with pytest.raises(ValueError):
            load_tensor(path)

    def test_rejects_missing_keys(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"data": [[1.0, 0.0]]}')
        with pytest.raises((ValueError, KeyError)):
            load_tensor(path)


finite = st.floats(min_value=-10, max_value=10, allow_nan=False)


@given(arrays(np.float64, (3, 2, 4), elements=finite))
def test_fold_unfold_property(data):
    a = Tensor3(data)
    assert np.array_equal(fold(unfold(a), 3).data, a.data)


@given(arrays(np.float64, (2, 3, 3), elements=finite))
def test_bcirc_round_trip_property(data):
    a = Tensor3(data)
    assert np.array_equal(bcirc_inv(bcirc(a), 3, 3, 2).data, a.data)
