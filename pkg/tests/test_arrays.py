import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sentihier.arrays import matmul, relu, relu_grad, softmax
from sentihier.errors import ShapeError


class TestMatmul:
    def test_identity(self):
        b = np.array([[5.0, 6.0], [7.0, 8.0]])
        np.testing.assert_array_equal(matmul(np.eye(2), b), b)

    def test_known_product(self):
        # Oracle: naive triple loop.
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        b = np.array([[5.0, 6.0], [7.0, 8.0]])
        expected = np.zeros((2, 2))
        for i in range(2):
            for j in range(2):
                for l in range(2):
                    expected[i, j] += a[i, l] * b[l, j]
        np.testing.assert_array_equal(matmul(a, b), [[19.0, 22.0], [43.0, 50.0]])
        np.testing.assert_array_equal(matmul(a, b), expected)

    def test_zero_annihilates(self):
        rng = np.random.default_rng(0)
        b = rng.normal(size=(3, 2))
        np.testing.assert_array_equal(matmul(np.zeros((2, 3)), b), np.zeros((2, 2)))

    def test_shape_mismatch_names_both_shapes(self):
        with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 2\)"):
            matmul(np.zeros((2, 3)), np.zeros((2, 2)))

    def test_associative_on_random_chains(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            a, b, c = (rng.normal(size=(4, 4)) for _ in range(3))
            left = matmul(matmul(a, b), c)
            right = matmul(a, matmul(b, c))
            np.testing.assert_allclose(left, right, rtol=1e-9, atol=1e-9)


class TestSoftmax:
    def test_uniform(self):
        np.testing.assert_allclose(softmax([0.0, 0.0, 0.0]), np.ones(3) / 3, atol=1e-15)

    def test_direct_evaluation(self):
        e = np.exp([1.0, 2.0, 3.0])
        np.testing.assert_allclose(softmax([1.0, 2.0, 3.0]), e / e.sum(), rtol=1e-14)

    def test_empty_rejected(self):
        with pytest.raises(ShapeError):
            softmax([])

    @given(st.lists(st.floats(-700, 700), min_size=1, max_size=20),
           st.floats(-1e8, 1e8))
    @settings(max_examples=200, deadline=None)
    def test_sums_to_one_and_shift_invariant(self, values, shift):
        out = softmax(values)
        assert np.all(np.isfinite(out))
        assert np.all((out >= 0) & (out <= 1 + 1e-12))
        assert abs(out.sum() - 1.0) <= 1e-12
        shifted = softmax(np.array(values) + shift)
        # exact in real arithmetic; in float64 the rounding error of the
        # shifted logits grows with the shift's magnitude
        tol = 1e-12 + abs(shift) * 1e-14
        assert np.max(np.abs(shifted - out)) <= tol

    def test_extreme_inputs_stay_finite(self):
        out = softmax([700.0, -700.0, 0.0])
        assert np.all(np.isfinite(out))
        assert abs(out.sum() - 1.0) <= 1e-12


class TestRelu:
    def test_definition(self):
        np.testing.assert_array_equal(relu([-1.0, 0.0, 2.0]), [0.0, 0.0, 2.0])

    def test_all_negative(self):
        np.testing.assert_array_equal(relu([-3.0, -0.5]), [0.0, 0.0])

    def test_absolute_value_identity(self):
        rng = np.random.default_rng(7)
        r = rng.normal(size=50)
        np.testing.assert_allclose(relu(r) + relu(-r), np.abs(r))

    def test_subgradient_zero_at_zero(self):
        np.testing.assert_array_equal(relu_grad([-1.0, 0.0, 2.0]), [0.0, 0.0, 1.0])
