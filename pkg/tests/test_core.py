import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import array_shapes, arrays

from makeupkit.core import (
    DiffOp,
    gradcheck,
    matmul,
    softmax_rows,
    softmax_rows_vjp,
)
from makeupkit.errors import DimensionError, MissingVjpError


def matmul_oracle(a, b):
    """Independent triple-loop matrix product."""
    m, k = a.shape
    _, n = b.shape
    out = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            s = 0.0
            for t in range(k):
                s += a[i, t] * b[t, j]
            out[i, j] = s
    return out


class TestMatmul:
    def test_identity(self):
        rng = np.random.default_rng(0)
        m = rng.normal(size=(3, 3))
        assert np.array_equal(matmul(np.eye(3), m), m)

    def test_hand_case(self):
        out = matmul([[1, 2], [3, 4]], [[1], [1]])
        assert np.array_equal(out, [[3], [7]])

    def test_against_loop_oracle(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(7, 5))
        b = rng.normal(size=(5, 4))
        out = matmul(a, b)
        ref = matmul_oracle(a, b)
        assert np.max(np.abs(out - ref)) / np.max(np.abs(ref)) < 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            matmul(np.ones((2, 3)), np.ones((4, 2)))
        with pytest.raises(DimensionError):
            matmul(np.ones(3), np.ones((3, 2)))

    @given(
        m=st.integers(1, 32), k=st.integers(1, 32), n=st.integers(1, 32),
        seed=st.integers(0, 2**16),
    )
    @settings(max_examples=25, deadline=None)
    def test_oracle_property(self, m, k, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(m, k))
        b = rng.normal(size=(k, n))
        out = matmul(a, b)
        ref = matmul_oracle(a, b)
        scale = max(np.max(np.abs(ref)), 1.0)
        assert np.max(np.abs(out - ref)) / scale < 1e-12


class TestSoftmaxRows:
    def test_single_element_rows(self):
        for c in (-50.0, 0.0, 3.25, 1e8):
            assert softmax_rows(np.array([[c]]))[0, 0] == 1.0

    def test_symmetric_row(self):
        out = softmax_rows(np.array([[0.0, 0.0]]))
        assert np.array_equal(out, [[0.5, 0.5]])

    def test_overflow_guard(self):
        out = softmax_rows(np.array([[1000.0, 1001.0]]))
        assert np.all(np.isfinite(out))
        expected = np.array([1.0 / (1.0 + np.e), np.e / (1.0 + np.e)])
        assert np.allclose(out[0], expected, atol=1e-12)
        assert abs(out[0, 0] - 0.2689) < 5e-5
        assert abs(out[0, 1] - 0.7311) < 5e-5

    @given(
        arrays(
            np.float64,
            array_shapes(min_dims=2, max_dims=2, max_side=12),
            elements=st.floats(-1e6, 1e6),
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_rows_sum_to_one(self, a):
        out = softmax_rows(a)
        assert np.all(out >= 0.0)
        assert np.max(np.abs(out.sum(axis=-1) - 1.0)) <= 1e-12


class TestGradcheck:
    def test_elementwise_square(self):
        op = DiffOp(forward=lambda x: x * x, vjp=lambda x, c: 2.0 * x * c)
        x = np.ones((3, 4))
        cot = np.random.default_rng(2).normal(size=(3, 4))
        report = gradcheck(op, x, cot, tol=1e-8)
        assert report.passed
        assert report.num_entries_checked == 12
        assert np.max(np.abs(2.0 * cot)) > 0  # analytic grad is 2*cotangent

    def test_softmax_passes(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(4, 6))
        cot = rng.normal(size=(4, 6))
        op = DiffOp(
            forward=softmax_rows,
            vjp=lambda a, c: softmax_rows_vjp(softmax_rows(a), c),
        )
        assert gradcheck(op, x, cot, tol=1e-4).passed

    def test_matmul_fixed_right_operand(self):
        rng = np.random.default_rng(4)
        b = rng.normal(size=(3, 3))
        op = DiffOp(forward=lambda x: x @ b, vjp=lambda x, c: c @ b.T)
        x = rng.normal(size=(3, 3))
        cot = rng.normal(size=(3, 3))
        assert gradcheck(op, x, cot, tol=1e-6).passed

    def test_missing_vjp(self):
        op = DiffOp(forward=lambda x: x)
        with pytest.raises(MissingVjpError):
            gradcheck(op, np.ones(2), np.ones(2), tol=1e-4)

    def test_wrong_vjp_fails(self):
        op = DiffOp(forward=lambda x: x * x, vjp=lambda x, c: 3.0 * x * c)
        report = gradcheck(op, np.ones((2, 2)), np.ones((2, 2)), tol=1e-4)
        assert not report.passed

    def test_pass_flag_tracks_tolerance(self):
        op = DiffOp(forward=lambda x: x * x, vjp=lambda x, c: 2.0 * x * c)
        x = np.full((2, 2), 1.5)
        cot = np.ones((2, 2))
        loose = gradcheck(op, x, cot, tol=1e-6)
        tight = gradcheck(op, x, cot, tol=1e-300)
        assert loose.passed and not tight.passed
        assert loose.max_rel_err == tight.max_rel_err
