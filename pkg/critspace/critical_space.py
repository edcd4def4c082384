"""The orbit tangent space 𝔤·f, its orthogonal complement H_f and membership tests.

Both tensor families are handled through their weighted coordinates (raw
coefficients divided by sqrt of the Frobenius weight; weight 1 on exterior
powers). In those coordinates the bilinear form q is the plain dot product, so
one rank/nullspace routine serves every ambient space.
"""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from pydantic import BaseModel

from . import frobenius
from .exterior import AlternatingTensor, so_action_ext, so_generators_ext
from .tensor_core import PSTensor, VectorTuple, evaluate, gradient_contraction, multiply_by_variable, partial_derivative

Tensor = Union[PSTensor, AlternatingTensor]
Label = Tuple[int, int, int]

# generators with norm below this fraction of the scale are treated as zero
NEGLIGIBLE = 1e-12


def coordinates(x: Tensor) -> np.ndarray:
    """Weighted coordinates of x: q(x, y) = coordinates(x) · coordinates(y)."""
    if isinstance(x, PSTensor):
        return frobenius.weighted_coordinates(x)
    if isinstance(x, AlternatingTensor):
        return x.coeffs
    raise TypeError(f"unsupported tensor type {type(x).__name__}")


def from_coordinates(template: Tensor, coords: np.ndarray) -> Tensor:
    if isinstance(template, PSTensor):
        return frobenius.from_weighted_coordinates(template.shape, coords)
    return template.like(coords)


def space_of(x: Tensor):
    return x.shape if isinstance(x, PSTensor) else x.space


def inner(x: Tensor, y: Tensor) -> complex:
    """The Frobenius form q(x, y) for either tensor family."""
    if space_of(x) != space_of(y):
        raise ValueError("shape mismatch")
    return complex(np.dot(coordinates(x), coordinates(y)))


def norm(x: Tensor) -> float:
    """Hermitian norm in weighted coordinates."""
    return float(np.linalg.norm(coordinates(x)))


class GeneratorSet:
    """The spanning set {D^{(p)}_{ij} f} of 𝔤·f with labels (p, i, j)."""

    __slots__ = ("generators", "labels")

    def __init__(self, generators: Sequence[Tensor], labels: Sequence[Label]):
        if len(generators) != len(labels):
            raise ValueError("one label per generator is required")
        self.generators: List[Tensor] = list(generators)
        self.labels: List[Label] = [tuple(label) for label in labels]

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(zip(self.labels, self.generators))

    def matrix(self) -> np.ndarray:
        """Rows are the weighted coordinates of the generators."""
        return np.array([coordinates(g) for g in self.generators])


class CriticalSpaceInfo(BaseModel):
    """Rank data of 𝔤·f; codim H_f equals the orbit dimension."""

    orbit_dimension: int
    projective_orbit_dimension: Optional[int] = None
    ambient_dimension: int
    codim_Hf: int
    lie_algebra_dimension: int
    singular_value_profile: List[float]


def rotation_generator(f: PSTensor, p: int, i: int, j: int) -> PSTensor:
    """D^{(p)}_{ij} f = ∂f/∂x_{p,i}·x_{p,j} − ∂f/∂x_{p,j}·x_{p,i}."""
    return multiply_by_variable(partial_derivative(f, p, i), p, j) - multiply_by_variable(
        partial_derivative(f, p, j), p, i
    )


def apply_generator(x: Tensor, label: Label) -> Tensor:
    """Apply the infinitesimal rotation named by ``label`` to any x of the ambient space."""
    p, i, j = label
    if isinstance(x, AlternatingTensor):
        return so_action_ext(x, i, j)
    return rotation_generator(x, p, i, j)


def infinitesimal_generators(f: PSTensor) -> GeneratorSet:
    """D^{(p)}_{ij} f for every factor p and 0 <= i < j <= n_p, in (p, i, j) order."""
    if isinstance(f, AlternatingTensor):
        return so_generators_ext(f)
    if any(degree == 0 for degree in f.shape.degrees):
        raise ValueError("cannot differentiate degree 0")
    labels = [(p, i, j) for p, dim in enumerate(f.shape.dims) for i in range(dim) for j in range(i + 1, dim)]
    return GeneratorSet(generators=[rotation_generator(f, *label) for label in labels], labels=labels)


def _numerical_rank(singular_values: np.ndarray, tol: float) -> int:
    if singular_values.size == 0 or singular_values[0] == 0:
        return 0
    return int(np.sum(singular_values > tol * singular_values[0]))


def orbit_dimension(gens: GeneratorSet, tol: float = 1e-8, f: Optional[Tensor] = None) -> CriticalSpaceInfo:
    """Numerical rank of the generator matrix, relative to its largest singular value.

    When f is given, the rank of 𝔤·f + <f> minus one is reported as the
    dimension of the orbit of [f] in P(V).
    """
    if len(gens) == 0:
        raise ValueError("generator set is empty")
    mat = gens.matrix()
    profile = scipy.linalg.svdvals(mat)
    rank = _numerical_rank(profile, tol)
    projective = None
    if f is not None:
        stacked = np.vstack([coordinates(f)[None, :], mat])
        projective = max(_numerical_rank(scipy.linalg.svdvals(stacked), tol) - 1, 0)
    return CriticalSpaceInfo(
        orbit_dimension=rank,
        projective_orbit_dimension=projective,
        ambient_dimension=mat.shape[1],
        codim_Hf=rank,
        lie_algebra_dimension=len(gens),
        singular_value_profile=[float(s) for s in profile],
    )


def generators_for(f: Tensor) -> GeneratorSet:
    if isinstance(f, AlternatingTensor):
        return so_generators_ext(f)
    return infinitesimal_generators(f)


def membership_breakdown(v: Tensor, f: Tensor, gens: Optional[GeneratorSet] = None) -> List[Tuple[Label, float]]:
    """|q(v, D)| / (|v|·|D|) per generator D of 𝔤·f.

    Generators that vanish (up to NEGLIGIBLE relative to |f| and the largest
    generator) and a zero v contribute 0.
    """
    if space_of(v) != space_of(f):
        raise ValueError("shape mismatch")
    gens = gens if gens is not None else generators_for(f)
    if len(gens) == 0:
        return []
    cv = coordinates(v)
    nv = float(np.linalg.norm(cv))
    mat = gens.matrix()
    gen_norms = np.linalg.norm(mat, axis=1)
    floor = NEGLIGIBLE * max(norm(f), float(gen_norms.max(initial=0.0)))
    out = []
    for label, row, gn in zip(gens.labels, mat, gen_norms):
        if nv == 0 or gn <= floor:
            out.append((label, 0.0))
        else:
            out.append((label, float(abs(np.dot(cv, row)) / (nv * gn))))
    return out


def membership_residual(v: Tensor, f: Tensor, gens: Optional[GeneratorSet] = None) -> float:
    """max_D |q(v, D)| / (|v|·|D|) over D ∈ 𝔤·f; zero iff v ∈ H_f."""
    return max((value for _, value in membership_breakdown(v, f, gens)), default=0.0)


def critical_space_basis(f: Tensor, tol: float = 1e-8) -> List[Tensor]:
    """A Hermitian-orthonormal basis of H_f = (𝔤·f)^⊥."""
    mat = generators_for(f).matrix()
    kernel = scipy.linalg.null_space(mat, rcond=tol)
    return [from_coordinates(f, kernel[:, c]) for c in range(kernel.shape[1])]


def minor_residual(g: np.ndarray, v: np.ndarray) -> float:
    """Largest 2×2 minor of the matrix with rows g, v, normalized by |g|·|v|.

    Zero iff g is parallel to v; a vanishing g counts as parallel.
    """
    g = np.asarray(g, dtype=complex)
    v = np.asarray(v, dtype=complex)
    ng, nv = np.linalg.norm(g), np.linalg.norm(v)
    if ng == 0 or nv == 0:
        return 0.0
    minors = np.outer(g, v) - np.outer(v, g)
    return float(np.max(np.abs(minors)) / (ng * nv))


def eigen_minor_residual(f: PSTensor, v) -> float:
    """Eigenvector test for symmetric f: minors of [∇f(v); v]."""
    t = VectorTuple([v])
    return minor_residual(gradient_contraction(f, t, 0), t[0])


def base_locus_residual(f: PSTensor, v) -> float:
    """max_{i<j} |D_ij f(v)| / (|∇f(v)|·|v|), the same minors read as polynomials."""
    t = VectorTuple([v])
    grad = gradient_contraction(f, t, 0)
    scale = np.linalg.norm(grad) * np.linalg.norm(t[0])
    if scale == 0:
        return 0.0
    values = [abs(evaluate(gen, t)) for gen in infinitesimal_generators(f).generators]
    return max(values, default=0.0) / scale
