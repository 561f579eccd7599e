import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eigenlab.errors import SingularMatrix, ValidationError
from eigenlab.linalg import (
    as_matrix,
    check_sym_psd,
    cholesky,
    eigenvalues_2x2,
    jacobi_eigen,
    offdiag_norm,
    qr_decompose,
    scale_of,
)
from eigenlab.sampling import sample_psd

from conftest import frob


class TestValidation:
    def test_rejects_nonsquare(self):
        with pytest.raises(ValidationError):
            as_matrix([[1.0, 2.0]])

    def test_rejects_nan(self):
        with pytest.raises(ValidationError):
            as_matrix([[1.0, float("nan")], [0.0, 1.0]])

    def test_rejects_asymmetric(self):
        with pytest.raises(ValidationError, match="not symmetric"):
            check_sym_psd([[1.0, 2.0], [3.0, 4.0]])

    def test_rejects_indefinite(self):
        with pytest.raises(ValidationError, match="not positive semi-definite"):
            check_sym_psd([[1.0, 0.0], [0.0, -3.0]])

    def test_accepts_tiny_asymmetry_and_negative_eigen_slack(self):
        m = np.array([[1.0, 1e-13], [0.0, 1.0]])
        check_sym_psd(m)

    def test_scale_floor_is_one(self):
        assert scale_of(np.array([[0.25]])) == 1.0
        assert scale_of(np.array([[4.0]])) == 4.0


class TestQrDecompose:
    def test_diagonal_is_its_own_factorisation(self):
        q, r = qr_decompose(np.diag([2.0, 1.0]))
        assert np.array_equal(q, np.eye(2))
        assert np.array_equal(r, np.diag([2.0, 1.0]))

    def test_worked_example_matches_gram_schmidt(self, worked_example):
        q, r = qr_decompose(worked_example)
        # Hand Gram-Schmidt: r11 = sqrt(2.5), q1 = (1.5, 0.5)/sqrt(2.5),
        # r12 = q1 . (0.5, 1.5), r22 = sqrt(1.6).
        assert abs(r[0, 0] - math.sqrt(2.5)) <= 1e-12
        assert abs(r[0, 1] - 0.9486832980505138) <= 1e-12
        assert abs(r[1, 1] - math.sqrt(1.6)) <= 1e-12
        assert abs(q[0, 0] - 0.948683298050514) <= 1e-6
        assert abs(q[1, 0] - 0.316227766016838) <= 1e-6
        assert r[1, 0] == 0.0

    def test_zero_matrix(self):
        q, r = qr_decompose(np.zeros((3, 3)))
        assert np.array_equal(q, np.eye(3))
        assert np.array_equal(r, np.zeros((3, 3)))

    def test_determinism_same_bits(self):
        rng = np.random.default_rng(1)
        m = rng.normal(size=(5, 5))
        q1, r1 = qr_decompose(m)
        q2, r2 = qr_decompose(m)
        assert np.array_equal(q1, q2) and np.array_equal(r1, r2)

    def test_nonnegative_diagonal_and_exact_zeros(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            m = rng.normal(size=(4, 4))
            _, r = qr_decompose(m)
            assert np.all(np.diag(r) >= 0.0)
            assert np.all(r[np.tril_indices(4, -1)] == 0.0)

    def test_orthogonality_and_reconstruction_500_seeded(self):
        rng = np.random.default_rng(42)
        for i in range(500):
            n = 2 + i % 7
            m = sample_psd(rng, n, lam_range=(0.05, 2.5))
            q, r = qr_decompose(m)
            scale = scale_of(m)
            assert frob(q.T @ q - np.eye(n)) <= 1e-12 * n
            assert frob(q @ r - m) <= 1e-11 * scale

    def test_positive_homogeneity_power_of_two_is_bitwise(self):
        rng = np.random.default_rng(3)
        m = sample_psd(rng, 4)
        q, r = qr_decompose(m)
        for lam in (0.125, 2.0, 1024.0):
            q2, r2 = qr_decompose(lam * m)
            assert np.array_equal(q2, q)
            assert np.array_equal(r2, lam * r)

    def test_positive_homogeneity_general_scale(self):
        rng = np.random.default_rng(4)
        m = sample_psd(rng, 3)
        q, r = qr_decompose(m)
        for lam in (1e-3, 7.0, 1e3):
            q2, r2 = qr_decompose(lam * m)
            assert np.max(np.abs(q2 - q)) <= 1e-13
            assert np.max(np.abs(r2 - lam * r)) <= 1e-12 * lam * scale_of(m)


class TestCholesky:
    def test_diagonal(self):
        assert np.array_equal(cholesky(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_worked_example_forward_substitution(self, worked_example):
        lower = cholesky(worked_example)
        assert abs(lower[0, 0] - math.sqrt(1.5)) <= 1e-12
        assert abs(lower[1, 0] - 0.4082482904638631) <= 1e-12
        assert abs(lower[1, 1] - math.sqrt(4.0 / 3.0)) <= 1e-12
        assert lower[0, 1] == 0.0

    def test_singular_raises(self):
        with pytest.raises(SingularMatrix):
            cholesky(np.diag([1.0, 0.0]))

    def test_near_singular_pivot_threshold(self):
        with pytest.raises(SingularMatrix):
            cholesky(np.diag([1.0, 5e-14]))

    def test_reconstruction_500_seeded(self):
        rng = np.random.default_rng(7)
        for i in range(500):
            n = 2 + i % 7
            m = sample_psd(rng, n, lam_range=(0.05, 2.5))
            lower = cholesky(m)
            assert frob(lower @ lower.T - m) <= 1e-11 * scale_of(m)
            assert np.all(np.diag(lower) > 0.0)


class TestJacobiEigen:
    def test_diagonal(self):
        values, vectors = jacobi_eigen(np.diag([3.0, 1.0]))
        assert np.array_equal(values, [3.0, 1.0])
        assert np.array_equal(vectors, np.eye(2))

    def test_worked_example(self, worked_example):
        values, vectors = jacobi_eigen(worked_example)
        assert np.allclose(values, [2.0, 1.0], atol=1e-12, rtol=0)
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        assert np.allclose(np.abs(vectors), inv_sqrt2, atol=1e-12)
        # sign convention: largest-magnitude component positive
        assert vectors[0, 0] > 0 and vectors[0, 1] > 0

    def test_scalar_matrix_any_dimension(self):
        for n in (1, 3, 6):
            values, vectors = jacobi_eigen(1.7 * np.eye(n))
            assert np.array_equal(values, np.full(n, 1.7))
            assert np.array_equal(vectors, np.eye(n))

    def test_residual_and_orthogonality(self):
        rng = np.random.default_rng(11)
        for i in range(100):
            n = 2 + i % 7
            m = sample_psd(rng, n, lam_range=(0.05, 2.5))
            values, vectors = jacobi_eigen(m)
            scale = scale_of(m)
            assert frob(m @ vectors - vectors @ np.diag(values)) <= 1e-10 * n * scale
            assert frob(vectors.T @ vectors - np.eye(n)) <= 1e-12 * n
            assert np.all(np.diff(values) <= 1e-15)

    def test_descending_tie_break_is_stable(self):
        values, vectors = jacobi_eigen(np.diag([2.0, 2.0, 1.0]))
        assert np.array_equal(values, [2.0, 2.0, 1.0])
        assert np.array_equal(vectors, np.eye(3))

    def test_converges_at_documented_size_boundary(self):
        # the sweep budget comfortably covers n = 64
        rng = np.random.default_rng(13)
        m = sample_psd(rng, 64, lam_range=(0.05, 2.5))
        values, vectors = jacobi_eigen(m)
        assert frob(m @ vectors - vectors @ np.diag(values)) <= 1e-10 * 64 * scale_of(m)

    @settings(max_examples=200, deadline=None)
    @given(
        a=st.floats(-5, 5), b=st.floats(-5, 5), c=st.floats(-5, 5),
    )
    def test_matches_2x2_closed_form(self, a, b, c):
        m = np.array([[a, b], [b, c]])
        hi, lo = eigenvalues_2x2(m)
        values, _ = jacobi_eigen(m)
        assert abs(values[0] - hi) <= 1e-12 * scale_of(m)
        assert abs(values[1] - lo) <= 1e-12 * scale_of(m)


@settings(max_examples=100, deadline=None)
@given(
    factor=arrays(
        np.float64, (3, 3),
        elements=st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False),
    )
)
def test_factorisations_roundtrip_on_generated_psd(factor):
    m = factor @ factor.T + 1e-6 * np.eye(3)
    q, r = qr_decompose(m)
    assert frob(q @ r - m) <= 1e-11 * scale_of(m)
    lower = cholesky(m)
    assert frob(lower @ lower.T - m) <= 1e-11 * scale_of(m)


def test_offdiag_norm():
    assert offdiag_norm(np.diag([3.0, 1.0])) == 0.0
    assert abs(offdiag_norm(np.array([[1.5, 0.5], [0.5, 1.5]])) - math.sqrt(0.5)) < 1e-15
