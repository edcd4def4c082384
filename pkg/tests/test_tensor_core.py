"""Tests for dense partially symmetric tensors."""

import numpy as np
import pytest

from critspace.tensor_core import (
    PSTensor,
    Shape,
    VectorTuple,
    evaluate,
    gradient_contraction,
    gradient_hessian,
    monomial_basis,
    multiply_by_variable,
    partial_derivative,
    rank_one,
)

MIXED = Shape.of((3, 3), (2, 2))


def integer_tensor(shape: Shape, seed: int) -> PSTensor:
    rng = np.random.default_rng(seed)
    return PSTensor(shape, rng.integers(-5, 6, shape.basis_size))


class TestShape:
    """Test shapes and the monomial basis order."""

    def test_binary_quadric_basis(self):
        """Test graded-lex order for a binary quadric."""
        assert monomial_basis(Shape.of((2, 2))) == [((2, 0),), ((1, 1),), ((0, 2),)]

    def test_single_variable(self):
        """Test the one-monomial basis of a single variable."""
        assert monomial_basis(Shape.of((1, 5))) == [((5,),)]

    def test_matrix_basis_first_factor_slowest(self):
        """Test that the first factor varies slowest."""
        assert monomial_basis(Shape.of((2, 1), (2, 1))) == [
            ((1, 0), (1, 0)),
            ((1, 0), (0, 1)),
            ((0, 1), (1, 0)),
            ((0, 1), (0, 1)),
        ]

    def test_basis_size(self):
        """Test that the basis size is the product of the factor sizes."""
        shape = Shape.of((3, 2), (2, 3))
        assert shape.array_shape == (6, 4)
        assert shape.basis_size == 24
        assert len(monomial_basis(shape)) == 24

    def test_label(self):
        """Test the human-readable shape label."""
        assert Shape.of((2, 2), (3, 1)).label() == "S2(C2)xS1(C3)"

    def test_coefficient_count_mismatch(self):
        """Test that a wrong coefficient count is rejected."""
        with pytest.raises(ValueError, match="coefficient count"):
            PSTensor(Shape.of((2, 2)), [1, 2])


class TestDerivatives:
    """Test differentiation and multiplication by a variable."""

    def test_derivative_of_square(self):
        """Test ∂x0 x0^2 = 2 x0."""
        f = PSTensor.monomial(Shape.of((2, 2)), [(2, 0)])
        g = partial_derivative(f, 0, 0)
        assert g.shape == Shape.of((2, 1))
        np.testing.assert_allclose(g.flat, [2, 0])

    def test_derivative_of_cubic(self, binary_cubic: PSTensor):
        """Test ∂x1 (x0^3 + x1^3) = 3 x1^2."""
        np.testing.assert_allclose(partial_derivative(binary_cubic, 0, 1).flat, [0, 0, 3])

    def test_derivative_in_second_factor(self, diagonal_matrix: PSTensor):
        """Test that differentiation lowers only its own factor's degree."""
        g = partial_derivative(diagonal_matrix, 1, 1)
        assert g.shape.degrees == (1, 0)
        np.testing.assert_allclose(g.flat, [0, 2])

    def test_degree_zero_raises(self):
        """Test that constants cannot be differentiated."""
        f = PSTensor(Shape.of((2, 0)), [1])
        with pytest.raises(ValueError, match="cannot differentiate degree 0"):
            partial_derivative(f, 0, 0)

    def test_multiply(self):
        """Test x1 · 2x0 = 2 x0 x1."""
        f = PSTensor(Shape.of((2, 1)), [2, 0])
        np.testing.assert_allclose(multiply_by_variable(f, 0, 1).flat, [0, 2, 0])

    def test_multiply_constant(self):
        """Test multiplying a constant by x0."""
        f = PSTensor(Shape.of((2, 0)), [1])
        np.testing.assert_allclose(multiply_by_variable(f, 0, 0).flat, [1, 0])

    def test_index_out_of_range(self, binary_cubic: PSTensor):
        """Test that bad factor or variable indices are rejected."""
        with pytest.raises(ValueError):
            partial_derivative(binary_cubic, 0, 2)
        with pytest.raises(ValueError):
            partial_derivative(binary_cubic, 1, 0)


class TestDerivativeIdentities:
    """Test identities every partial derivative must satisfy."""

    @pytest.mark.parametrize("seed", range(5))
    def test_mixed_partials_commute(self, seed):
        """Test ∂_{p,i}∂_{q,j} f = ∂_{q,j}∂_{p,i} f exactly on integer tensors."""
        f = integer_tensor(MIXED, seed)
        for p, i in [(0, 0), (0, 2), (1, 1)]:
            for q, j in [(0, 1), (1, 0), (1, 1)]:
                left = partial_derivative(partial_derivative(f, q, j), p, i)
                right = partial_derivative(partial_derivative(f, p, i), q, j)
                np.testing.assert_array_equal(left.coeffs, right.coeffs)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_central_difference(self, seed):
        """Test ∂_{p,i} f against a central difference with step 1e-5."""
        rng = np.random.default_rng(seed)
        f = PSTensor(MIXED, rng.standard_normal(MIXED.basis_size))
        point = [rng.standard_normal(3), rng.standard_normal(2)]
        h = 1e-5
        for p, dim in enumerate(MIXED.dims):
            for i in range(dim):
                step = np.zeros(dim)
                step[i] = h
                forward = [v + step if q == p else v for q, v in enumerate(point)]
                backward = [v - step if q == p else v for q, v in enumerate(point)]
                estimate = (evaluate(f, VectorTuple(forward)) - evaluate(f, VectorTuple(backward))) / (2 * h)
                exact = evaluate(partial_derivative(f, p, i), VectorTuple(point))
                assert abs(estimate - exact) <= 1e-6 * max(1.0, abs(exact))

    @pytest.mark.parametrize("seed", range(5))
    def test_euler_homogeneity(self, seed):
        """Test Σ_i x_{p,i} ∂_{p,i} f = d_p f exactly on integer tensors."""
        f = integer_tensor(MIXED, seed)
        for p, (dim, degree) in enumerate(zip(MIXED.dims, MIXED.degrees)):
            total = PSTensor.zeros(MIXED)
            for i in range(dim):
                total = total + multiply_by_variable(partial_derivative(f, p, i), p, i)
            np.testing.assert_array_equal(total.coeffs, degree * f.coeffs)


class TestEvaluation:
    """Test evaluation, gradients and rank-one tensors."""

    def test_isotropic_zero(self):
        """Test that x0^2 + x1^2 vanishes at (1, i)."""
        f = PSTensor(Shape.of((2, 2)), [1, 0, 1])
        assert abs(evaluate(f, VectorTuple([[1, 1j]]))) < 1e-14

    def test_cubic_at_ones(self, binary_cubic: PSTensor):
        """Test evaluation of x0^3 + x1^3 at (1, 1)."""
        assert evaluate(binary_cubic, VectorTuple([[1, 1]])) == pytest.approx(2)

    def test_matrix_off_diagonal(self, diagonal_matrix: PSTensor):
        """Test a bilinear form on an off-diagonal pair."""
        assert evaluate(diagonal_matrix, VectorTuple([[1, 0], [0, 1]])) == 0

    def test_gradient_eigenvector_witness(self, binary_cubic: PSTensor):
        """Test that the gradient at an eigenvector is parallel to it."""
        np.testing.assert_allclose(gradient_contraction(binary_cubic, VectorTuple([[1, 1]]), 0), [3, 3])

    def test_gradient_matrix(self, diagonal_matrix: PSTensor):
        """Test the gradient of a bilinear form in the first factor."""
        g = gradient_contraction(diagonal_matrix, VectorTuple([[1, 0], [1, 0]]), 0)
        np.testing.assert_allclose(g, [1, 0])

    def test_gradient_vanishes(self):
        """Test a vanishing gradient."""
        f = PSTensor.monomial(Shape.of((2, 2)), [(2, 0)])
        np.testing.assert_allclose(gradient_contraction(f, VectorTuple([[0, 1]]), 0), [0, 0])

    def test_dimension_mismatch(self, binary_cubic: PSTensor):
        """Test that points of the wrong dimension are rejected."""
        with pytest.raises(ValueError, match="dimension mismatch"):
            evaluate(binary_cubic, VectorTuple([[1, 1, 1]]))

    def test_rank_one_square(self):
        """Test (x0 + x1)^2."""
        np.testing.assert_allclose(rank_one(VectorTuple([[1, 1]]), Shape.of((2, 2))).flat, [1, 2, 1])

    def test_rank_one_cube(self):
        """Test x0^3."""
        np.testing.assert_allclose(rank_one(VectorTuple([[1, 0]]), Shape.of((2, 3))).flat, [1, 0, 0, 0])

    def test_rank_one_matrix(self):
        """Test an outer product of two vectors."""
        x = rank_one(VectorTuple([[1, 2], [3, 0]]), Shape.of((2, 1), (2, 1)))
        np.testing.assert_allclose(x.coeffs, [[3, 0], [6, 0]])

    def test_rank_one_evaluates_to_product(self, rng):
        """Test that v^d evaluates to the product of powered pairings."""
        shape = Shape.of((3, 2), (2, 3))
        t = VectorTuple([rng.standard_normal(3), rng.standard_normal(2)])
        s = VectorTuple([rng.standard_normal(3), rng.standard_normal(2)])
        expected = (t[0] @ s[0]) ** 2 * (t[1] @ s[1]) ** 3
        assert evaluate(rank_one(t, shape), s) == pytest.approx(expected)

    def test_zero_vector_rejected(self):
        """Test that vector tuples cannot contain zero."""
        with pytest.raises(ValueError, match="zero vector"):
            VectorTuple([[0, 0]])

    def test_conjugate(self):
        """Test entrywise conjugation of a vector tuple."""
        t = VectorTuple([[1, 1j], [2 - 1j, 0]]).conjugate()
        np.testing.assert_array_equal(t[0], [1, -1j])
        np.testing.assert_array_equal(t[1], [2 + 1j, 0])


class TestGradientHessian:
    """Test the stacked gradient and Hessian used by Newton."""

    def test_gradients_match(self, rng):
        """Test the stacked gradients and Hessian symmetry."""
        shape = Shape.of((2, 2), (3, 1))
        f = PSTensor(shape, rng.standard_normal(shape.basis_size))
        t = VectorTuple([rng.standard_normal(2), rng.standard_normal(3)])
        grads, hessian = gradient_hessian(f, t)
        for p in range(2):
            np.testing.assert_allclose(grads[p], gradient_contraction(f, t, p))
        np.testing.assert_allclose(hessian, hessian.T)

    def test_euler_identity(self, rng):
        """Homogeneity: H_pp·v_p = (d_p - 1)·∇_p f and H_pq·v_q = d_q·∇_p f."""
        shape = Shape.of((2, 3), (2, 2))
        f = PSTensor(shape, rng.standard_normal(shape.basis_size))
        t = VectorTuple([rng.standard_normal(2), rng.standard_normal(2)])
        grads, hessian = gradient_hessian(f, t)
        np.testing.assert_allclose(hessian[0:2, 0:2] @ t[0], 2 * grads[0], rtol=1e-10)
        np.testing.assert_allclose(hessian[0:2, 2:4] @ t[1], 2 * grads[0], rtol=1e-10)
        np.testing.assert_allclose(hessian[2:4, 2:4] @ t[1], 1 * grads[1], rtol=1e-10)
