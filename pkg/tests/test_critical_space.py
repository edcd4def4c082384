"""Tests for the orbit tangent space and H_f membership."""

from math import comb

import numpy as np
import pytest

from critspace.critical_space import (
    apply_generator,
    base_locus_residual,
    coordinates,
    critical_space_basis,
    eigen_minor_residual,
    generators_for,
    inner,
    infinitesimal_generators,
    membership_breakdown,
    membership_residual,
    minor_residual,
    norm,
    orbit_dimension,
)
from critspace.experiments import isotropic_slice_tensor, random_tensor
from critspace.exterior import AlternatingTensor
from critspace.tensor_core import PSTensor, Shape, VectorTuple, rank_one

TRIPLE = Shape.of((2, 1), (2, 1), (2, 1))


class TestGenerators:
    """Test D^{(p)}_{ij} f."""

    def test_square(self):
        """Test the single generator of x0^2."""
        gens = infinitesimal_generators(PSTensor.monomial(Shape.of((2, 2)), [(2, 0)]))
        assert gens.labels == [(0, 0, 1)]
        np.testing.assert_allclose(gens.generators[0].flat, [0, 2, 0])

    def test_cubic(self, binary_cubic: PSTensor):
        """Test D_01 (x0^3 + x1^3) = 3 x0^2 x1 - 3 x0 x1^2."""
        gens = infinitesimal_generators(binary_cubic)
        np.testing.assert_allclose(gens.generators[0].flat, [0, 3, -3, 0])

    def test_three_factor_count(self):
        """Test one generator per binary factor, labelled (p, i, j)."""
        gens = infinitesimal_generators(random_tensor(TRIPLE, 1))
        assert len(gens) == 3
        assert gens.labels == [(0, 0, 1), (1, 0, 1), (2, 0, 1)]

    def test_label_count_for_ternary_factor(self):
        """Test C(3,2) + C(2,2) generators."""
        gens = infinitesimal_generators(random_tensor(Shape.of((3, 2), (2, 1)), 1))
        assert len(gens) == 3 + 1

    def test_degree_zero_factor(self):
        """Test that a degree-zero factor is rejected."""
        with pytest.raises(ValueError, match="cannot differentiate degree 0"):
            infinitesimal_generators(PSTensor(Shape.of((2, 0), (2, 1)), [1, 0]))

    @pytest.mark.parametrize("pairs", [((2, 3),), ((3, 2), (2, 2)), ((2, 1), (2, 1), (2, 1))])
    def test_antisymmetry(self, pairs):
        """q(D·x, y) = -q(x, D·y) for every generator."""
        shape = Shape.of(*pairs)
        x = random_tensor(shape, 3, "complex")
        y = random_tensor(shape, 4, "complex")
        for label in generators_for(x).labels:
            total = inner(apply_generator(x, label), y) + inner(x, apply_generator(y, label))
            assert abs(total) <= 1e-10 * norm(x) * norm(y)


class TestOrbitDimension:
    def test_generic_triple(self):
        """Test the dimensions for a random 2x2x2 tensor."""
        info = orbit_dimension(generators_for(random_tensor(TRIPLE, 11)))
        assert info.orbit_dimension == 3
        assert info.codim_Hf == 3
        assert info.ambient_dimension == 8
        assert info.lie_algebra_dimension == 3

    @pytest.mark.parametrize("pairs", [((2, 1), (2, 1), (2, 1)), ((3, 3),), ((3, 2), (2, 1))])
    def test_codimension_is_generic(self, pairs):
        """Test codim H_f = Σ_p C(n_p + 1, 2) on at least 95% of 200 Gaussian samples."""
        shape = Shape.of(*pairs)
        expected = sum(comb(dim, 2) for dim in shape.dims)
        hits = sum(orbit_dimension(generators_for(random_tensor(shape, seed))).codim_Hf == expected for seed in range(200))
        assert hits >= 190

    def test_power_of_variable(self):
        """Test that x0^4 has a one-dimensional orbit."""
        f = PSTensor.monomial(Shape.of((2, 4)), [(4, 0)])
        assert orbit_dimension(generators_for(f)).orbit_dimension == 1

    @pytest.mark.parametrize("position", [0, 1, 2])
    @pytest.mark.parametrize("sign", ["+", "-"])
    def test_isotropic_slice(self, rng, position, sign):
        """u ⊗ M with u isotropic: the isotropic factor scales f, so only the projective orbit drops."""
        M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        f = isotropic_slice_tensor(position, sign, M)
        info = orbit_dimension(generators_for(f), f=f)
        assert info.orbit_dimension == 3
        assert info.projective_orbit_dimension <= 2

    def test_rank_one_isotropic_factor(self):
        """Test that an isotropic rank-one factor drops the projective orbit."""
        u = np.array([1, 1j])
        f = rank_one(VectorTuple([u, [1, 2], [3, 1]]), TRIPLE)
        info = orbit_dimension(generators_for(f), f=f)
        assert info.projective_orbit_dimension <= 2

    def test_generic_projective(self):
        """Test the full projective orbit of a random tensor."""
        f = random_tensor(TRIPLE, 12)
        assert orbit_dimension(generators_for(f), f=f).projective_orbit_dimension == 3

    def test_exterior_rank(self):
        """Test the orbit of e0 ∧ e1 in ∧2 C3."""
        f = AlternatingTensor.basis_element(3, [0, 1])
        assert orbit_dimension(generators_for(f)).orbit_dimension == 2


def project(basis, x) -> np.ndarray:
    """Orthogonal projection of coordinates(x) onto the span of ``basis``."""
    K = np.column_stack([coordinates(h) for h in basis])
    return K @ (K.conj().T @ coordinates(x))


class TestCriticalSpaceBasis:
    def test_binary_cubic_dimension(self):
        """Test dim H_f = 3 for a generic binary cubic."""
        assert len(critical_space_basis(random_tensor(Shape.of((2, 3)), 5))) == 3

    def test_triple_dimension(self):
        """Test that every basis vector of H_f lies in H_f."""
        f = random_tensor(TRIPLE, 6)
        basis = critical_space_basis(f)
        assert len(basis) == 5
        for h in basis:
            assert membership_residual(h, f) <= 1e-10

    def test_basis_is_orthonormal(self):
        """Test that the basis is Hermitian-orthonormal in weighted coordinates."""
        basis = critical_space_basis(random_tensor(Shape.of((3, 2), (2, 1)), 7))
        K = np.column_stack([coordinates(h) for h in basis])
        np.testing.assert_allclose(K.conj().T @ K, np.eye(len(basis)), atol=1e-12)

    @pytest.mark.parametrize("pairs", [((2, 3),), ((2, 1), (2, 1), (2, 1)), ((3, 2), (2, 1))])
    def test_projection_fixes_exactly_members(self, pairs):
        """Test that projecting onto the basis fixes members of H_f and moves everything else."""
        shape = Shape.of(*pairs)
        f = random_tensor(shape, 8)
        basis = critical_space_basis(f)
        rng = np.random.default_rng(8)
        member = sum((complex(c) * h for c, h in zip(rng.standard_normal(len(basis)), basis)), f * 0)
        assert membership_residual(member, f) <= 1e-10
        np.testing.assert_allclose(project(basis, member), coordinates(member), atol=1e-10)

        other = random_tensor(shape, 9)
        assert membership_residual(other, f) > 1e-6
        assert np.linalg.norm(project(basis, other) - coordinates(other)) > 1e-6

    def test_f_lies_in_its_critical_space(self):
        """Test f ∈ H_f."""
        for seed in range(20):
            f = random_tensor(Shape.of((3, 3), (2, 1)), seed, "complex")
            assert membership_residual(f, f) <= 1e-12


class TestMembership:
    def test_eigenvector_passes(self, binary_cubic: PSTensor):
        """Test that an eigenvector power lies in H_f."""
        x = rank_one(VectorTuple([[1, 1]]), binary_cubic.shape)
        assert membership_residual(x, binary_cubic) <= 1e-8

    def test_random_point_fails(self, rng):
        """Test that a random rank-one point is not in H_f."""
        f = random_tensor(Shape.of((2, 3)), 9)
        x = rank_one(VectorTuple([rng.standard_normal(2)]), f.shape)
        assert membership_residual(x, f) > 1e-6

    def test_breakdown_labels(self):
        """Test that the breakdown is reported per generator label."""
        f = random_tensor(TRIPLE, 2)
        breakdown = membership_breakdown(f, f)
        assert [label for label, _ in breakdown] == [(0, 0, 1), (1, 0, 1), (2, 0, 1)]

    def test_zero_point(self, binary_cubic: PSTensor):
        """Test that zero is in every H_f."""
        assert membership_residual(PSTensor.zeros(binary_cubic.shape), binary_cubic) == 0

    def test_shape_mismatch(self, binary_cubic: PSTensor):
        """Test that points of another shape are rejected."""
        with pytest.raises(ValueError, match="shape mismatch"):
            membership_residual(PSTensor(Shape.of((2, 2)), [1, 0, 0]), binary_cubic)

    def test_rotation_invariant_f(self):
        """(x0² + x1²)² has no nonzero generator, so everything is critical."""
        f = PSTensor(Shape.of((2, 4)), [1, 0, 2, 0, 1])
        x = rank_one(VectorTuple([[1, 2]]), f.shape)
        assert membership_residual(x, f) == 0


class TestResiduals:
    def test_parallel(self):
        """Test that parallel vectors have zero minors."""
        assert minor_residual([2, 4], [1, 2]) == pytest.approx(0)

    def test_orthogonal(self):
        """Test the normalized minor of orthogonal unit vectors."""
        assert minor_residual([1, 0], [0, 1]) == pytest.approx(1)

    def test_zero_counts_as_parallel(self):
        """Test that a zero gradient counts as parallel."""
        assert minor_residual([0, 0], [1, 2]) == 0

    def test_eigenvector_tests_agree(self, binary_cubic: PSTensor):
        """Test that the minor and base-locus tests agree on eigenvectors."""
        for v in ([1, 0], [0, 1], [1, 1]):
            assert eigen_minor_residual(binary_cubic, v) <= 1e-14
            assert base_locus_residual(binary_cubic, v) <= 1e-14
        assert eigen_minor_residual(binary_cubic, [1, 2]) > 0.1
        assert base_locus_residual(binary_cubic, [1, 2]) > 0.1
