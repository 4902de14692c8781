import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from coocmap.errors import ValidationError
from coocmap.kernels import (
    centerc,
    clip,
    clip_thresholds,
    drop_head,
    epow,
    normalize,
    percentile,
    procrustes,
    psd_sqrt_gram,
    sim_matrix,
    svd,
    trunc,
    unitr,
    unitr_l1,
)

finite = st.floats(-10, 10, allow_nan=False, width=64)


def small_matrices(min_side=1, max_side=8, elements=finite):
    shapes = st.tuples(
        st.integers(min_side, max_side), st.integers(min_side, max_side)
    )
    return shapes.flatmap(lambda s: arrays(np.float64, s, elements=elements))


def ref_percentile(values, p):
    """Independent linear-interpolation percentile for the clip oracle."""
    xs = sorted(values)
    if len(xs) == 1:
        return xs[0]
    h = (len(xs) - 1) * p / 100.0
    lo = int(np.floor(h))
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (h - lo) * (xs[hi] - xs[lo])


class TestElementwise:
    def test_epow_sqrt(self):
        np.testing.assert_allclose(epow(np.array([[4.0, 9.0]]), 0.5), [[2.0, 3.0]])

    def test_epow_identity(self):
        X = np.array([[1.0, -2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(epow(X, 1.0), X)

    def test_epow_diag(self):
        np.testing.assert_allclose(
            epow(np.array([[1.0, 0.0], [0.0, 16.0]]), 0.5),
            [[1.0, 0.0], [0.0, 4.0]],
        )

    def test_epow_domain_error(self):
        with pytest.raises(ValidationError):
            epow(np.array([[-1.0]]), 0.5)

    def test_unitr_345(self):
        np.testing.assert_allclose(unitr(np.array([[3.0, 4.0]])), [[0.6, 0.8]])

    def test_unitr_zero_row_preserved(self):
        np.testing.assert_array_equal(unitr(np.array([[0.0, 0.0]])), [[0.0, 0.0]])

    def test_unitr_idempotent_on_unit_rows(self):
        X = unitr(np.array([[1.0, 2.0], [0.0, -3.0]]))
        np.testing.assert_allclose(unitr(X), X)

    def test_unitr_l1_zero_row(self):
        X = np.array([[1.0, -3.0], [0.0, 0.0]])
        np.testing.assert_allclose(unitr_l1(X), [[0.25, -0.75], [0.0, 0.0]])

    def test_centerc(self):
        np.testing.assert_allclose(
            centerc(np.array([[1.0, 2.0], [3.0, 4.0]])), [[-1.0, -1.0], [1.0, 1.0]]
        )

    def test_centerc_idempotent(self):
        X = centerc(np.random.default_rng(0).random((4, 3)))
        np.testing.assert_allclose(centerc(X), X, atol=1e-15)

    def test_centerc_single_cell(self):
        np.testing.assert_array_equal(centerc(np.array([[5.0]])), [[0.0]])


class TestNormalize:
    def test_is_the_composition(self):
        X = np.random.default_rng(1).random((4, 4))
        np.testing.assert_array_equal(normalize(X), unitr(centerc(unitr(X))))

    def test_equal_rows_annihilated(self):
        X = np.tile([1.0, 2.0, 3.0], (4, 1))
        np.testing.assert_allclose(normalize(X), np.zeros((4, 3)), atol=1e-15)

    def test_identity_2x2(self):
        r = np.sqrt(0.5)
        np.testing.assert_allclose(
            normalize(np.eye(2)), [[r, -r], [-r, r]], atol=1e-12
        )

    @given(small_matrices(min_side=2))
    @settings(max_examples=80)
    def test_rows_unit_or_zero(self, X):
        norms = np.linalg.norm(normalize(X), axis=1)
        for n in norms:
            assert abs(n - 1.0) <= 1e-10 or n == 0.0


class TestPercentileAndClip:
    def test_midpoint_interpolation(self):
        assert percentile([1, 2, 3, 4], 50) == 2.5

    def test_single_value(self):
        for p in (0, 37.5, 100):
            assert percentile([7], p) == 7

    def test_inclusive_top(self):
        assert percentile([1, 2, 3, 4, 5], 100) == 5

    def test_matches_reference(self):
        rng = np.random.default_rng(2)
        xs = rng.random(17)
        for p in (0, 1, 37.2, 50, 99, 100):
            assert percentile(xs, p) == pytest.approx(ref_percentile(xs, p), abs=1e-12)

    def test_constant_matrix_unchanged(self):
        X = np.full((3, 4), 2.5)
        np.testing.assert_array_equal(clip(X, 1, 99), X)

    def test_inside_range_unchanged(self):
        # repeated extremes put the thresholds exactly at min/max
        rng = np.random.default_rng(3)
        X = rng.uniform(0.2, 0.8, size=(10, 100))
        X[:, :5] = 0.0
        X[:, -5:] = 1.0
        lo, hi = clip_thresholds(X, 1, 99)
        assert (lo, hi) == (0.0, 1.0)
        np.testing.assert_array_equal(clip(X, 1, 99), X)

    def test_outlier_pulled_to_threshold(self):
        # every row shares the minimum so only the outlier moves
        X = np.array([[5.0, 5.0, 7.0], [5.0, 7.0, 5.0], [5.0, 5.0, 1000.0]])
        row_his = [ref_percentile(row, 99) for row in X]
        hi = ref_percentile(row_his, 99)
        lo = ref_percentile([ref_percentile(row, 1) for row in X], 1)
        assert lo == 5.0 and hi == pytest.approx(960.6372)
        got = clip(X, 1, 99)
        expected = X.copy()
        expected[2, 2] = hi
        np.testing.assert_allclose(got, expected)

    def test_thresholds_validation(self):
        with pytest.raises(ValidationError):
            clip_thresholds(np.ones((2, 2)), 99, 1)

    @given(small_matrices(min_side=2))
    @settings(max_examples=80)
    def test_bounds_and_order_preserved(self, X):
        lo, hi = clip_thresholds(X, 1, 99)
        Y = clip(X, 1, 99)
        assert Y.min() >= lo - 1e-12 and Y.max() <= hi + 1e-12
        order = np.argsort(X, axis=None, kind="stable")
        assert np.all(np.diff(Y.flat[order]) >= 0)


class TestSvdOps:
    def test_factors_contract(self):
        rng = np.random.default_rng(4)
        X = rng.random((6, 4))
        f = svd(X)
        np.testing.assert_allclose(f.U.T @ f.U, np.eye(4), atol=1e-8)
        np.testing.assert_allclose(f.Vt @ f.Vt.T, np.eye(4), atol=1e-8)
        assert np.all(np.diff(f.S) <= 0) and np.all(f.S >= 0)
        recon = (f.U * f.S) @ f.Vt
        assert np.linalg.norm(recon - X) <= 1e-6 * np.linalg.norm(X)

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(5)
        X = rng.random((5, 5))
        f1, f2 = svd(X), svd(X.copy())
        assert f1.U.tobytes() == f2.U.tobytes()
        assert f1.Vt.tobytes() == f2.Vt.tobytes()
        # largest-magnitude entry of each column is nonnegative
        lead = np.abs(f1.U).argmax(axis=0)
        assert np.all(f1.U[lead, np.arange(5)] >= 0)

    def test_drop_rank1_gives_zero(self):
        u = np.array([[1.0], [2.0], [3.0]])
        X = u @ u.T
        assert np.abs(drop_head(X, 1)).max() <= 1e-8

    def test_drop_zero_is_identity(self):
        X = np.random.default_rng(6).random((4, 4))
        np.testing.assert_array_equal(drop_head(X, 0), X)

    def test_drop_diagonal(self):
        np.testing.assert_allclose(
            drop_head(np.diag([3.0, 2.0, 1.0]), 1), np.diag([0.0, 2.0, 1.0]), atol=1e-12
        )

    def test_drop_spectral_property(self):
        rng = np.random.default_rng(7)
        X = rng.random((10, 8))
        s = np.linalg.svd(X, compute_uv=False)
        for r in (1, 3):
            top = np.linalg.svd(drop_head(X, r), compute_uv=False)[0]
            assert top == pytest.approx(s[r], abs=1e-6)

    def test_trunc_diagonal(self):
        np.testing.assert_allclose(
            trunc(np.diag([3.0, 1.0]), 1), [[3.0, 0.0], [0.0, 0.0]], atol=1e-12
        )

    def test_trunc_full_rank_is_identity(self):
        X = np.random.default_rng(8).random((4, 4))
        np.testing.assert_allclose(trunc(X, 4), X, atol=1e-10)
        np.testing.assert_allclose(trunc(X, 9), X, atol=1e-10)

    def test_trunc_numerical_rank(self):
        X = np.random.default_rng(9).random((6, 6))
        s = np.linalg.svd(trunc(X, 2), compute_uv=False)
        assert np.all(s[2:] <= 1e-8 * s[0])

    def test_trunc_beats_random_competitors(self):
        rng = np.random.default_rng(10)
        X = rng.random((5, 5))
        best = np.linalg.norm(X - trunc(X, 2))
        for _ in range(100):
            A = rng.standard_normal((5, 2))
            B = rng.standard_normal((2, 5))
            scale = np.trace(B @ X.T @ A) / np.linalg.norm(A @ B) ** 2
            assert best <= np.linalg.norm(X - scale * (A @ B)) + 1e-12

    def test_psd_sqrt_diag(self):
        np.testing.assert_allclose(
            psd_sqrt_gram(np.diag([1.0, 2.0])), np.diag([1.0, 2.0]), atol=1e-12
        )

    def test_psd_sqrt_orthonormal_rows(self):
        Q = np.linalg.qr(np.random.default_rng(11).random((3, 3)))[0]
        np.testing.assert_allclose(psd_sqrt_gram(Q), np.eye(3), atol=1e-10)

    def test_psd_sqrt_squares_to_gram(self):
        Xv = np.random.default_rng(12).random((3, 2))
        R = psd_sqrt_gram(Xv)
        np.testing.assert_allclose(R, R.T, atol=1e-10)
        np.testing.assert_allclose(R @ R, Xv @ Xv.T, atol=1e-6)


class TestSimMatrix:
    def test_identical_rows_cosine_one(self):
        X = np.array([[1.0, 2.0]])
        assert sim_matrix(X, X, "cosine")[0, 0] == pytest.approx(1.0)

    def test_orthogonal_rows_cosine_zero(self):
        S = sim_matrix(np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]]), "cosine")
        assert S[0, 0] == pytest.approx(0.0)

    def test_zero_row_convention(self):
        S = sim_matrix(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]]), "cosine")
        assert S[0, 0] == 0.0

    def test_unit_diagonal_for_nonzero_rows(self):
        X = np.random.default_rng(13).random((5, 3)) + 0.1
        np.testing.assert_allclose(np.diag(sim_matrix(X, X, "cosine")), 1.0, atol=1e-12)

    def test_negative_distances(self):
        X = np.array([[0.0, 0.0]])
        Z = np.array([[3.0, 4.0]])
        assert sim_matrix(X, Z, "neg_l2")[0, 0] == pytest.approx(-5.0)
        assert sim_matrix(X, Z, "neg_l1")[0, 0] == pytest.approx(-7.0)

    def test_dot(self):
        S = sim_matrix(np.array([[1.0, 2.0]]), np.array([[3.0, 4.0]]), "dot")
        assert S[0, 0] == 11.0

    def test_unknown_metric(self):
        with pytest.raises(ValidationError):
            sim_matrix(np.ones((1, 2)), np.ones((1, 2)), "manhattan")

    def test_width_mismatch(self):
        with pytest.raises(ValidationError):
            sim_matrix(np.ones((1, 2)), np.ones((1, 3)))


def random_rotation(d, rng):
    Q = np.linalg.qr(rng.standard_normal((d, d)))[0]
    return Q


class TestProcrustes:
    def test_self_alignment_is_identity(self):
        X = np.random.default_rng(14).random((6, 3))
        np.testing.assert_allclose(procrustes(X, X), np.eye(3), atol=1e-8)

    def test_recovers_constructed_rotation(self):
        rng = np.random.default_rng(15)
        X = rng.random((10, 4))
        R = random_rotation(4, rng)
        W = procrustes(X, X @ R)
        np.testing.assert_allclose(W, R, atol=1e-6)

    def test_orthogonality(self):
        rng = np.random.default_rng(16)
        W = procrustes(rng.random((8, 3)), rng.random((8, 3)))
        np.testing.assert_allclose(W.T @ W, np.eye(3), atol=1e-8)

    def test_beats_random_orthogonal_competitors(self):
        rng = np.random.default_rng(17)
        X, Z = rng.random((7, 3)), rng.random((7, 3))
        best = np.linalg.norm(X @ procrustes(X, Z) - Z)
        for _ in range(100):
            assert best <= np.linalg.norm(X @ random_rotation(3, rng) - Z) + 1e-12

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(18)
        X, Z = rng.random((9, 3)), rng.random((9, 3))
        perm = rng.permutation(9)
        np.testing.assert_allclose(
            procrustes(X, Z), procrustes(X[perm], Z[perm]), atol=1e-8
        )

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            procrustes(np.zeros((0, 3)), np.zeros((0, 3)))
        with pytest.raises(ValidationError):
            procrustes(np.zeros((3, 0)), np.zeros((3, 0)))
