"""
Tests for Householder QR, the small dense helpers and the random streams.
"""

import numpy as np
import pytest

from src.core_linalg import RngStream, back_substitute, mat_vec, qr_thin, sample_gaussian, solve_regularized, trial_stream
from src.errors import DimensionMismatch, RankDeficient, Singular


class TestQrThin:

    def test_identity(self):
        Q, R = qr_thin(np.eye(2))
        np.testing.assert_allclose(Q, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(R, np.eye(2), atol=1e-15)

    def test_single_column(self):
        Q, R = qr_thin(np.array([[3.0], [4.0]]))
        np.testing.assert_allclose(Q, [[0.6], [0.8]], atol=1e-15)
        np.testing.assert_allclose(R, [[5.0]], atol=1e-15)

    def test_random_tall_matrix(self, rng):
        H = rng.standard_normal((8, 4))
        Q, R = qr_thin(H)
        np.testing.assert_allclose(Q.T @ Q, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(Q @ R, H, atol=1e-12)
        assert np.all(np.tril(R, -1) == 0.0)
        assert np.all(np.diag(R) >= 0.0)

    def test_bounds_over_many_shapes(self, rng):
        for _ in range(1000):
            n = int(rng.integers(4, 33))
            m = int(rng.integers(1, n + 1))
            H = rng.standard_normal((n, m))
            Q, R = qr_thin(H)
            assert Q.shape == (n, m) and R.shape == (m, m)
            assert np.all(np.tril(R, -1) == 0.0)
            assert np.all(np.diag(R) >= 0.0)
            assert np.linalg.norm(Q.T @ Q - np.eye(m), np.inf) <= 1e-10
            assert np.linalg.norm(H - Q @ R, np.inf) <= 1e-10 * np.linalg.norm(H, np.inf)

    def test_rank_deficient(self):
        H = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
        with pytest.raises(RankDeficient):
            qr_thin(H)

    def test_wide_matrix_rejected(self):
        with pytest.raises(DimensionMismatch):
            qr_thin(np.ones((2, 3)))


class TestSmallHelpers:

    def test_mat_vec_identity(self):
        np.testing.assert_allclose(mat_vec(np.eye(3), [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])

    def test_mat_vec_zero(self):
        np.testing.assert_allclose(mat_vec(np.zeros((2, 3)), [4.0, 5.0, 6.0]), [0.0, 0.0])

    def test_mat_vec_hand(self):
        np.testing.assert_allclose(mat_vec([[1.0, 2.0], [3.0, 4.0]], [1.0, 1.0]), [3.0, 7.0])

    def test_mat_vec_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mat_vec(np.eye(2), [1.0, 2.0, 3.0])

    def test_back_substitute(self):
        R = np.array([[2.0, 1.0], [0.0, 4.0]])
        np.testing.assert_allclose(back_substitute(R, np.array([5.0, 8.0])), [1.5, 2.0])


class TestSolveRegularized:

    def test_identity_unregularized(self):
        np.testing.assert_allclose(solve_regularized(np.eye(2), [1.0, -1.0], 0.0), [1.0, -1.0], atol=1e-15)

    def test_identity_regularized(self):
        np.testing.assert_allclose(solve_regularized(np.eye(2), [1.0, -1.0], 1.0), [0.5, -0.5], atol=1e-15)

    def test_normal_equations(self, rng):
        H = rng.standard_normal((8, 4))
        y = rng.standard_normal(8)
        for sigma2 in (0.0, 0.7):
            u = solve_regularized(H, y, sigma2)
            residual = (H.T @ H + sigma2 * np.eye(4)) @ u - H.T @ y
            assert np.linalg.norm(residual) <= 1e-9

    def test_unregularized_matches_direct_solve(self, rng):
        for n in (2, 4, 8, 16):
            # singular values in [1, 10]
            U, _ = np.linalg.qr(rng.standard_normal((n, n)))
            V, _ = np.linalg.qr(rng.standard_normal((n, n)))
            H = U @ np.diag(rng.uniform(1.0, 10.0, n)) @ V.T
            y = rng.standard_normal(n)
            np.testing.assert_allclose(solve_regularized(H, y, 0.0), np.linalg.solve(H, y), rtol=0, atol=1e-8)

    def test_singular(self):
        with pytest.raises(Singular):
            solve_regularized(np.array([[1.0, 1.0], [1.0, 1.0]]), [1.0, 2.0], 0.0)


class TestRngStream:

    def test_determinism(self):
        a = sample_gaussian(RngStream(5, 3), 16)
        b = sample_gaussian(RngStream(5, 3), 16)
        np.testing.assert_array_equal(a, b)

    def test_moments(self):
        v = sample_gaussian(RngStream(1, 0), 10 ** 6)
        assert abs(v.mean()) <= 0.01
        assert abs(v.var() - 1.0) <= 0.01

    def test_stream_separation(self):
        assert not np.array_equal(sample_gaussian(RngStream(5, 0), 8), sample_gaussian(RngStream(5, 1), 8))

    def test_trial_stream_layout(self):
        assert trial_stream(9, 2, 7).stream_id == (2 << 32) | 7
        assert trial_stream(9, 0, 1).stream_id != trial_stream(9, 1, 0).stream_id

    def test_invalid_length(self):
        with pytest.raises(DimensionMismatch):
            sample_gaussian(RngStream(0), 0)
