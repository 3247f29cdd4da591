"""Generalized inverses: Moore-Penrose, Drazin, group, limits."""

import numpy as np
import pytest

from ttool import (
    IllConditionedError,
    ShapeError,
    SingularError,
    Tensor3,
    TIndexError,
    core_nilpotent,
    drazin_limit,
    drazin_via_formula,
    fro_norm,
    identity_tensor,
    is_range_hermitian,
    nilpotency,
    nilpotent_limit,
    t_drazin,
    t_group_inverse,
    t_index,
    t_moore_penrose,
    t_rank,
    tinv,
    tpow,
    tprod,
)

from helpers import (
    max_zero_size,
    plant_index,
    plant_nilpotent,
    rand_ep,
    rand_non_ep,
    rand_tensor,
)


def t112(first, second):
    return Tensor3([[[first]], [[second]]])


J2 = Tensor3(np.array([[[0.0, 1.0], [0.0, 0.0]]]))


class TestRankAndIndex:
    def test_rank_tube(self):
        assert t_rank(t112(1, -1)) == 1
        assert t_rank(t112(1, 2)) == 2

    def test_rank_bounds(self):
        assert t_rank(identity_tensor(3, 2)) == 6
        assert t_rank(Tensor3(np.zeros((2, 3, 3)))) == 0

    def test_rank_rectangular(self, rng):
        a = rand_tensor(rng, 3, 5, 2)
        assert t_rank(a) == 6

    def test_index_examples(self):
        assert t_index(t112(1, -1)) == 1
        assert t_index(J2) == 2
        assert t_index(identity_tensor(2, 3)) == 0
        assert t_index(t112(1, 2)) == 0

    def test_index_matches_planted(self, rng):
        for k in (0, 1, 2, 3):
            a, structure = plant_index(rng, 5, 2, k)
            assert t_index(a) == max_zero_size(structure) == k


class TestMoorePenrose:
    def test_tube_example(self):
        rep = t_moore_penrose(t112(1, -1))
        np.testing.assert_allclose(
            rep.inverse.data.ravel(), [0.25, -0.25], atol=1e-12
        )
        assert rep.kind == "moore_penrose"
        assert rep.t_index is None

    def test_residual_keys(self, rng):
        rep = t_moore_penrose(rand_tensor(rng, 3, 4, 2))
        assert set(rep.residuals) == {"axa", "xax", "ax_hermitian", "xa_hermitian"}
        assert all(v <= 1e-10 for v in rep.residuals.values())

    def test_invertible_reduces_to_inverse(self, rng):
        a = Tensor3(rng.standard_normal((2, 3, 3)) + 4 * np.eye(3))
        np.testing.assert_allclose(
            t_moore_penrose(a).inverse.data, tinv(a).data, atol=1e-10
        )

    def test_rectangular_shape(self, rng):
        a = rand_tensor(rng, 2, 5, 3)
        x = t_moore_penrose(a).inverse
        assert x.shape == (5, 2, 3)

    def test_rank_deficient(self, rng):
        # outer product has t-rank p; all four equations still hold
        u = rand_tensor(rng, 4, 1, 2)
        a = tprod(u, conj_t(u))
        rep = t_moore_penrose(a)
        assert all(v <= 1e-8 for v in rep.residuals.values())


def conj_t(a):
    from ttool import conj_transpose

    return conj_transpose(a)


class TestDrazin:
    def test_tube_example(self):
        rep = t_drazin(t112(1, -1))
        np.testing.assert_allclose(
            rep.inverse.data.ravel(), [0.25, -0.25], atol=1e-12
        )
        assert rep.kind == "drazin"
        assert rep.t_index == 1

    def test_nilpotent_is_zero(self):
        rep = t_drazin(J2)
        np.testing.assert_allclose(rep.inverse.data, 0, atol=1e-12)
        assert rep.t_index == 2

    def test_residual_keys(self, rng):
        a, _ = plant_index(rng, 4, 2, 2)
        rep = t_drazin(a)
        assert set(rep.residuals) == {"akxa", "xax", "commute"}
        assert all(v <= 1e-8 for v in rep.residuals.values())

    def test_matches_formula_route(self, rng):
        for k in (0, 1, 2):
            a, _ = plant_index(rng, 4, 2, k)
            x = t_drazin(a).inverse
            alt = drazin_via_formula(a)
            assert fro_norm(x - alt) <= 1e-8 * max(1.0, fro_norm(x))

    def test_cross_check_passes(self, rng):
        a, _ = plant_index(rng, 4, 2, 2)
        rep = t_drazin(a, cross_check=True)
        assert rep.t_index == 2

    def test_gray_zone_raises(self):
        # eigenvalue in the decade above the zero cut: ambiguous split
        a = Tensor3(np.diag([1.0, 5e-3])[None, :, :])
        with pytest.raises(IllConditionedError):
            t_drazin(a)

    def test_invertible_is_tinv(self, rng):
        a = Tensor3(rng.standard_normal((2, 3, 3)) + 4 * np.eye(3))
        rep = t_drazin(a)
        assert rep.t_index == 0
        np.testing.assert_allclose(rep.inverse.data, tinv(a).data, atol=1e-10)


class TestGroupInverse:
    def test_tube_example(self):
        rep = t_group_inverse(t112(1, -1))
        np.testing.assert_allclose(
            rep.inverse.data.ravel(), [0.25, -0.25], atol=1e-12
        )
        assert rep.kind == "group"
        assert set(rep.residuals) == {"axa", "xax", "commute"}

    def test_refuses_high_index(self):
        with pytest.raises(TIndexError) as err:
            t_group_inverse(J2)
        assert err.value.t_index == 2

    def test_group_equals_mp_for_range_hermitian(self, rng):
        a = rand_ep(rng, 4, 2, rank=2)
        assert is_range_hermitian(a)
        g = t_group_inverse(a).inverse
        m = t_moore_penrose(a).inverse
        assert fro_norm(g - m) <= 1e-8 * fro_norm(m)

    def test_group_differs_from_mp_otherwise(self, rng):
        a = rand_non_ep(rng, 4, 2, rank=2)
        assert not is_range_hermitian(a)
        g = t_group_inverse(a).inverse
        m = t_moore_penrose(a).inverse
        assert fro_norm(g - m) > 1e-3 * fro_norm(m)


class TestRangeHermitian:
    def test_hermitian_tube(self):
        assert is_range_hermitian(t112(1, -1))

    def test_shift_block(self):
        assert not is_range_hermitian(J2)

    def test_invertible_always(self, rng):
        a = Tensor3(rng.standard_normal((2, 3, 3)) + 4 * np.eye(3))
        assert is_range_hermitian(a)


class TestCoreNilpotent:
    def test_index_one_tube(self):
        cn = core_nilpotent(t112(1, -1))
        assert cn.t_index == 1
        np.testing.assert_allclose(cn.core.data.ravel(), [1, -1], atol=1e-10)
        np.testing.assert_allclose(cn.nilpotent.data, 0, atol=1e-10)

    def test_split_properties(self, rng):
        a, structure = plant_index(rng, 5, 2, 2)
        cn = core_nilpotent(a)
        np.testing.assert_allclose(
            (cn.core + cn.nilpotent).data, a.data, atol=1e-14 * fro_norm(a)
        )
        assert cn.t_index == 2
        assert nilpotency(cn.nilpotent) == 2
        scale = max(1.0, fro_norm(a)) ** 2
        assert fro_norm(tprod(cn.core, cn.nilpotent)) <= 1e-9 * scale
        assert fro_norm(tprod(cn.nilpotent, cn.core)) <= 1e-9 * scale

    def test_routes_agree(self, rng):
        a, _ = plant_index(rng, 4, 2, 2)
        via_drazin = core_nilpotent(a, via="drazin")
        via_split = core_nilpotent(a, via="split")
        gap = fro_norm(via_drazin.core - via_split.core)
        assert gap <= 1e-9 * max(1.0, fro_norm(a))
        assert via_drazin.t_index == via_split.t_index

    def test_rejects_unknown_route(self):
        with pytest.raises(ValueError):
            core_nilpotent(t112(1, -1), via="magic")


class TestDrazinLimit:
    def test_errors_shrink_along_grid(self, rng):
        a, _ = plant_index(rng, 4, 2, 1, moduli=(0.4, 1.2))
        estimate, errors = drazin_limit(a)
        assert len(errors) == 4
        assert all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
        x = t_drazin(a).inverse
        assert fro_norm(estimate - x) <= 1e-5 * fro_norm(x)

    def test_exponent_below_index_refused(self, rng):
        a, _ = plant_index(rng, 4, 2, 2)
        with pytest.raises(TIndexError) as err:
            drazin_limit(a, l=1)
        assert err.value.t_index == 2

    def test_invertible_exponent_zero(self, rng):
        a = Tensor3(rng.standard_normal((2, 3, 3)) + 4 * np.eye(3))
        estimate, errors = drazin_limit(a, l=0)
        np.testing.assert_allclose(estimate.data, tinv(a).data, atol=1e-6)

    def test_z_collision_raises(self):
        a = Tensor3(np.array([[[-1e-2]]]))
        with pytest.raises(SingularError):
            drazin_limit(a, l=0)  # default grid starts at z = 1e-2

    def test_z_sequence_validation(self):
        a = t112(1, 2)
        with pytest.raises(ValueError):
            drazin_limit(a, z_sequence=[])
        with pytest.raises(ValueError):
            drazin_limit(a, z_sequence=[1e-2, 1e-2])
        with pytest.raises(ValueError):
            drazin_limit(a, z_sequence=[1e-4, -1e-5])


class TestNilpotentLimit:
    def test_shift_block_cases(self):
        # index 2: converges iff m + q >= 2
        res = nilpotent_limit(J2, 0, 2)
        assert res.converged
        np.testing.assert_allclose(res.value.data, 0, atol=1e-10)

        res = nilpotent_limit(J2, 1, 1)
        assert res.converged
        np.testing.assert_allclose(res.value.data, J2.data, atol=1e-8)

        res = nilpotent_limit(J2, 2, 0)
        assert res.converged
        np.testing.assert_allclose(res.value.data, -J2.data, atol=1e-8)

        res = nilpotent_limit(J2, 0, 1)
        assert not res.converged
        assert res.value is None
        assert res.norms[-1] > res.norms[0]

    def test_planted_nilpotent(self, rng):
        a = plant_nilpotent(rng, 4, 2, 3)
        scale = max(1.0, fro_norm(a)) ** 3
        res = nilpotent_limit(a, 2, 1)
        assert res.converged
        want = -tpow(a, 2)  # (-1)^(m+1) a^(m+q-1) with m = 2
        assert fro_norm(res.value - want) <= 1e-6 * scale
        assert not nilpotent_limit(a, 1, 1).converged

    def test_invertible_resolvent(self, rng):
        a = Tensor3(rng.standard_normal((2, 3, 3)) + 4 * np.eye(3))
        res = nilpotent_limit(a, 0, 1)
        assert res.converged
        np.testing.assert_allclose(
            res.value.data, identity_tensor(3, 2).data, atol=1e-6
        )

    def test_rejects_negative_orders(self):
        with pytest.raises(ValueError):
            nilpotent_limit(J2, -1, 0)
        with pytest.raises(ValueError):
            nilpotent_limit(J2, 0, -1)

    def test_requires_f_square(self):
        with pytest.raises(ShapeError):
            nilpotent_limit(Tensor3(np.zeros((2, 2, 3))), 1, 1)
