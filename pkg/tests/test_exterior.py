"""Tests for exterior powers."""

import numpy as np
import pytest

from critspace.exterior import (
    AlternatingTensor,
    decomposable,
    gram_inner,
    leibniz_derivative,
    so_generators_ext,
    subsets,
    tangent_frame,
    wedge,
)


def e(n_plus_1: int, *indices: int) -> AlternatingTensor:
    return AlternatingTensor.basis_element(n_plus_1, indices)


def coefficient(f: AlternatingTensor, indices) -> complex:
    return f.coeffs[subsets(f.n_plus_1, f.k).index(tuple(indices))]


class TestWedge:
    """Test u ∧ v."""

    def test_basis(self):
        """Test e0 ∧ e1."""
        assert coefficient(wedge(e(3, 0), e(3, 1)), (0, 1)) == 1

    def test_anticommutative(self):
        """Test e1 ∧ e0 = -e0 ∧ e1."""
        assert coefficient(wedge(e(3, 1), e(3, 0)), (0, 1)) == -1

    def test_expansion(self):
        """Test bilinear expansion of a wedge of sums."""
        u = AlternatingTensor.vector([1, 1, 0])
        v = AlternatingTensor.vector([1, -1, 0])
        np.testing.assert_allclose(wedge(u, v).coeffs, (-2 * e(3, 0, 1)).coeffs)

    def test_graded_sign(self, rng):
        """Test that a 2-vector commutes with a vector."""
        u = AlternatingTensor(5, 2, rng.standard_normal(10))
        v = AlternatingTensor(5, 1, rng.standard_normal(5))
        np.testing.assert_allclose(wedge(u, v).coeffs, wedge(v, u).coeffs)

    def test_degree_overflow(self):
        """Test that wedges beyond the ambient dimension are rejected."""
        with pytest.raises(ValueError, match="degree overflow"):
            wedge(e(3, 0, 1), e(3, 1, 2))

    def test_ambient_mismatch(self):
        """Test that factors from different spaces are rejected."""
        with pytest.raises(ValueError, match="ambient mismatch"):
            wedge(e(3, 0), e(4, 1))

    def test_repeated_index_vanishes(self):
        """Test e1 ∧ e1 = 0."""
        assert not np.any(e(3, 1, 1).coeffs)


class TestLeibniz:
    def test_first_slot(self):
        """Test ∂_0 (e0 ∧ e1) = e1."""
        np.testing.assert_allclose(leibniz_derivative(e(3, 0, 1), 0).coeffs, e(3, 1).coeffs)

    def test_absent_index(self):
        """Test that differentiating by an absent index gives zero."""
        assert not np.any(leibniz_derivative(e(3, 0, 1), 2).coeffs)

    def test_sign_bookkeeping(self):
        """Test the sign when the differentiated index sits in the first slot."""
        f = wedge(AlternatingTensor.vector([1, 0, 1]), e(3, 1))
        np.testing.assert_allclose(leibniz_derivative(f, 2).coeffs, e(3, 1).coeffs)

    def test_degree_zero(self):
        """Test that scalars cannot be differentiated."""
        with pytest.raises(ValueError, match="cannot differentiate degree 0"):
            leibniz_derivative(AlternatingTensor(3, 0, [1]), 0)

    @pytest.mark.parametrize("k", [2, 3])
    def test_derivatives_anticommute(self, k):
        """Test ∂_i ∂_j = -∂_j ∂_i exactly on integer tensors."""
        rng = np.random.default_rng(k)
        f = AlternatingTensor(5, k, rng.integers(-5, 6, len(subsets(5, k))))
        for i in range(5):
            for j in range(5):
                left = leibniz_derivative(leibniz_derivative(f, j), i)
                right = leibniz_derivative(leibniz_derivative(f, i), j)
                np.testing.assert_array_equal(left.coeffs, -right.coeffs)

    def test_repeated_derivative_vanishes(self):
        """Test ∂_i ∂_i = 0."""
        f = e(4, 0, 1, 2) + e(4, 1, 2, 3)
        for i in range(4):
            assert not np.any(leibniz_derivative(leibniz_derivative(f, i), i).coeffs)


class TestGenerators:
    def test_plane_in_three_space(self):
        """Test the three rotation generators on e0 ∧ e1."""
        gens = so_generators_ext(e(3, 0, 1))
        assert gens.labels == [(0, 0, 1), (0, 0, 2), (0, 1, 2)]
        assert not np.any(gens.generators[0].coeffs)
        np.testing.assert_allclose(gens.generators[1].coeffs, e(3, 1, 2).coeffs)
        np.testing.assert_allclose(gens.generators[2].coeffs, (-1 * e(3, 0, 2)).coeffs)

    def test_count(self, rng):
        """Test C(4,2) generators in ∧2 C4."""
        assert len(so_generators_ext(AlternatingTensor(4, 2, rng.standard_normal(6)))) == 6

    def test_top_degree_rejected(self):
        """Test that k = n + 1 is rejected."""
        with pytest.raises(ValueError, match="1 <= k <= n"):
            so_generators_ext(AlternatingTensor(3, 3, [1]))


class TestDecomposable:
    def test_coordinate_plane(self):
        """Test the Plücker vector of a coordinate plane."""
        np.testing.assert_allclose(decomposable([[1, 0, 0], [0, 1, 0]]).coeffs, e(3, 0, 1).coeffs)

    def test_dependent(self):
        """Test that dependent rows give zero."""
        assert not np.any(decomposable([[1, 2, 3], [2, 4, 6]]).coeffs)

    def test_minors(self):
        """Test that coefficients are the maximal minors."""
        np.testing.assert_allclose(decomposable([[1, 1, 0], [0, 1, 1]]).coeffs, [1, 1, 1])

    def test_gram_determinant(self, rng):
        """Test ⟨v1 ∧ v2, w1 ∧ w2⟩ = det(V Wᵀ)."""
        for _ in range(20):
            V = rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))
            W = rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))
            lhs = gram_inner(decomposable(V), decomposable(W))
            rhs = np.linalg.det(V @ W.T)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))

    def test_tangent_frame_shape(self):
        """Test that the tangent frame spans the 5-dimensional cone tangent."""
        frame = tangent_frame([[1, 0, 0, 0], [0, 1, 0, 0]])
        assert frame.shape == (8, 6)
        assert np.linalg.matrix_rank(frame) == 5
