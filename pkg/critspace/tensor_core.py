"""Dense partially symmetric tensors viewed as multi-homogeneous polynomials.

An element of Sym^{d_1}V_1 ⊗ ... ⊗ Sym^{d_k}V_k is stored through its raw
monomial coefficients, f = Σ_α c_α x^α (no multinomial pre-scaling).

Basis order: inside a factor of dimension n+1 and degree d the exponents
(α_0, ..., α_n) with |α| = d are listed in descending lexicographic order,
e.g. x0², x0·x1, x1². Factors are concatenated left to right with the first
factor varying slowest. The coefficients live in a k-dimensional array of
shape (N_1, ..., N_k), N_p = C(n_p + d_p, d_p); its C-order ravel is the flat
coefficient list used by the JSON format.
"""

from functools import lru_cache, reduce
from itertools import product
from math import comb, prod
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

Exponent = Tuple[int, ...]
MultiExponent = Tuple[Exponent, ...]


class Factor(BaseModel):
    """One tensor factor Sym^degree(C^dim)."""

    model_config = ConfigDict(frozen=True)

    dim: int = Field(ge=1)
    degree: int = Field(ge=0)

    @property
    def basis_size(self) -> int:
        return comb(self.dim - 1 + self.degree, self.degree)


class Shape(BaseModel):
    """Ordered factors (dim, degree) of a partially symmetric tensor space."""

    model_config = ConfigDict(frozen=True)

    factors: Tuple[Factor, ...] = Field(min_length=1)

    @classmethod
    def of(cls, *pairs: Tuple[int, int]) -> "Shape":
        """Build a shape from (dim, degree) pairs."""
        return cls(factors=tuple(Factor(dim=dim, degree=degree) for dim, degree in pairs))

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(f.degree for f in self.factors)

    @property
    def array_shape(self) -> Tuple[int, ...]:
        return tuple(f.basis_size for f in self.factors)

    @property
    def basis_size(self) -> int:
        return prod(self.array_shape)

    def with_degree(self, p: int, degree: int) -> "Shape":
        factors = list(self.factors)
        factors[p] = Factor(dim=factors[p].dim, degree=degree)
        return Shape(factors=tuple(factors))

    def label(self) -> str:
        """Short human label, e.g. ``S2(C2)xS1(C3)``."""
        return "x".join(f"S{f.degree}(C{f.dim})" for f in self.factors)


def _compositions(total: int, parts: int) -> Iterator[Exponent]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


@lru_cache(maxsize=None)
def factor_exponents(dim: int, degree: int) -> np.ndarray:
    """Exponent rows of Sym^degree(C^dim) in basis order, shape (N, dim)."""
    rows = np.array(list(_compositions(degree, dim)), dtype=np.int64).reshape(-1, dim)
    rows.flags.writeable = False
    return rows


@lru_cache(maxsize=None)
def _factor_index(dim: int, degree: int) -> dict:
    return {tuple(int(a) for a in row): idx for idx, row in enumerate(factor_exponents(dim, degree))}


@lru_cache(maxsize=None)
def _derivative_matrix(dim: int, degree: int, i: int) -> np.ndarray:
    """Matrix of ∂/∂x_i from Sym^degree to Sym^(degree-1)."""
    target = _factor_index(dim, degree - 1)
    exps = factor_exponents(dim, degree)
    mat = np.zeros((len(target), len(exps)))
    for col, row in enumerate(exps):
        if row[i] > 0:
            lowered = list(int(a) for a in row)
            lowered[i] -= 1
            mat[target[tuple(lowered)], col] = row[i]
    mat.flags.writeable = False
    return mat


@lru_cache(maxsize=None)
def _multiplication_matrix(dim: int, degree: int, j: int) -> np.ndarray:
    """Matrix of multiplication by x_j from Sym^degree to Sym^(degree+1)."""
    target = _factor_index(dim, degree + 1)
    exps = factor_exponents(dim, degree)
    mat = np.zeros((len(target), len(exps)))
    for col, row in enumerate(exps):
        raised = list(int(a) for a in row)
        raised[j] += 1
        mat[target[tuple(raised)], col] = 1.0
    mat.flags.writeable = False
    return mat


def _apply_along(matrix: np.ndarray, coeffs: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(matrix, coeffs, axes=([1], [axis])), 0, axis)


class PSTensor:
    """Immutable dense partially symmetric tensor."""

    __slots__ = ("shape", "coeffs")

    def __init__(self, shape: Shape, coeffs):
        arr = np.array(coeffs, dtype=complex)
        if arr.size != shape.basis_size:
            raise ValueError(
                f"coefficient count {arr.size} does not match basis size {shape.basis_size} "
                f"of {shape.label()}"
            )
        arr = arr.reshape(shape.array_shape)
        arr.flags.writeable = False
        self.shape = shape
        self.coeffs = arr

    @classmethod
    def zeros(cls, shape: Shape) -> "PSTensor":
        return cls(shape, np.zeros(shape.array_shape, dtype=complex))

    @classmethod
    def monomial(cls, shape: Shape, exponent: Sequence[Sequence[int]], value: complex = 1.0) -> "PSTensor":
        """The tensor value·x^exponent."""
        coeffs = np.zeros(shape.array_shape, dtype=complex)
        idx = []
        for factor, alpha in zip(shape.factors, exponent, strict=True):
            alpha = tuple(int(a) for a in alpha)
            try:
                idx.append(_factor_index(factor.dim, factor.degree)[alpha])
            except KeyError:
                raise ValueError(f"exponent {alpha} does not fit factor {factor}") from None
        coeffs[tuple(idx)] = value
        return cls(shape, coeffs)

    @property
    def flat(self) -> np.ndarray:
        return self.coeffs.ravel()

    def like(self, coeffs) -> "PSTensor":
        return PSTensor(self.shape, coeffs)

    def _check_same(self, other: "PSTensor") -> None:
        if not isinstance(other, PSTensor) or other.shape != self.shape:
            raise ValueError("shape mismatch")

    def __add__(self, other: "PSTensor") -> "PSTensor":
        self._check_same(other)
        return self.like(self.coeffs + other.coeffs)

    def __sub__(self, other: "PSTensor") -> "PSTensor":
        self._check_same(other)
        return self.like(self.coeffs - other.coeffs)

    def __neg__(self) -> "PSTensor":
        return self.like(-self.coeffs)

    def __mul__(self, scalar: complex) -> "PSTensor":
        return self.like(self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"PSTensor({self.shape.label()}, nnz={int(np.count_nonzero(self.coeffs))})"


class VectorTuple:
    """Immutable tuple (v_1, ..., v_k) of nonzero complex vectors."""

    __slots__ = ("vectors",)

    def __init__(self, vectors: Sequence[Sequence[complex]]):
        vs = []
        for v in vectors:
            arr = np.array(v, dtype=complex).ravel()
            if not np.any(arr):
                raise ValueError("vector tuple contains a zero vector")
            arr.flags.writeable = False
            vs.append(arr)
        if not vs:
            raise ValueError("vector tuple must contain at least one vector")
        self.vectors: Tuple[np.ndarray, ...] = tuple(vs)

    @property
    def k(self) -> int:
        return len(self.vectors)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(v.size for v in self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def __getitem__(self, p: int) -> np.ndarray:
        return self.vectors[p]

    def normalized(self) -> "VectorTuple":
        """Unit vectors with the largest coordinate made real positive."""
        return VectorTuple([fix_phase(v) for v in self.vectors])

    def conjugate(self) -> "VectorTuple":
        return VectorTuple([np.conj(v) for v in self.vectors])

    def __repr__(self) -> str:
        return f"VectorTuple(dims={self.dims})"


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Scale v to unit norm with its first largest entry real and positive."""
    v = np.asarray(v, dtype=complex)
    pivot = v[int(np.argmax(np.abs(v)))]
    return v * (np.conj(pivot) / abs(pivot)) / np.linalg.norm(v)


def _check_factor(shape: Shape, p: int) -> Factor:
    if not 0 <= p < shape.k:
        raise ValueError(f"factor index {p} out of range for {shape.k} factors")
    return shape.factors[p]


def _check_tuple(shape: Shape, t: VectorTuple) -> None:
    if t.dims != shape.dims:
        raise ValueError(f"dimension mismatch: tuple dims {t.dims} vs shape dims {shape.dims}")


def monomial_basis(shape: Shape) -> List[MultiExponent]:
    """All multi-homogeneous exponents of ``shape`` in basis order."""
    per_factor = [
        [tuple(int(a) for a in row) for row in factor_exponents(f.dim, f.degree)]
        for f in shape.factors
    ]
    return list(product(*per_factor))


def partial_derivative(f: PSTensor, p: int, i: int) -> PSTensor:
    """∂f/∂x_{p,i}; factor p drops one degree."""
    factor = _check_factor(f.shape, p)
    if factor.degree == 0:
        raise ValueError("cannot differentiate degree 0")
    if not 0 <= i < factor.dim:
        raise ValueError(f"variable index {i} out of range for factor {p}")
    mat = _derivative_matrix(factor.dim, factor.degree, i)
    return PSTensor(f.shape.with_degree(p, factor.degree - 1), _apply_along(mat, f.coeffs, p))


def multiply_by_variable(f: PSTensor, p: int, j: int) -> PSTensor:
    """x_{p,j}·f; factor p gains one degree."""
    factor = _check_factor(f.shape, p)
    if not 0 <= j < factor.dim:
        raise ValueError(f"variable index {j} out of range for factor {p}")
    mat = _multiplication_matrix(factor.dim, factor.degree, j)
    return PSTensor(f.shape.with_degree(p, factor.degree + 1), _apply_along(mat, f.coeffs, p))


def monomial_values(v: np.ndarray, degree: int) -> np.ndarray:
    """The vector (v^α)_α over the basis of Sym^degree."""
    return monomial_jet(v, degree)[0]


def monomial_jet(v: np.ndarray, degree: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Monomial values with first and second derivatives in v.

    Returns (m, dm, d2m) of shapes (N,), (N, n+1), (N, n+1, n+1).
    """
    v = np.asarray(v, dtype=complex)
    dim = v.size
    exps = factor_exponents(dim, degree)
    powers = np.ones((dim, degree + 1), dtype=complex)
    for e in range(1, degree + 1):
        powers[:, e] = powers[:, e - 1] * v
    cols = np.arange(dim)
    base = powers[cols[None, :], exps]
    values = base.prod(axis=1)

    first = np.zeros((len(exps), dim), dtype=complex)
    second = np.zeros((len(exps), dim, dim), dtype=complex)
    for i in range(dim):
        a_i = exps[:, i]
        low_i = powers[i, np.maximum(a_i - 1, 0)]
        rest_i = np.delete(base, i, axis=1).prod(axis=1)
        first[:, i] = a_i * low_i * rest_i
        second[:, i, i] = a_i * (a_i - 1) * powers[i, np.maximum(a_i - 2, 0)] * rest_i
        for j in range(i + 1, dim):
            a_j = exps[:, j]
            low_j = powers[j, np.maximum(a_j - 1, 0)]
            rest_ij = np.delete(base, [i, j], axis=1).prod(axis=1)
            second[:, i, j] = second[:, j, i] = a_i * a_j * low_i * low_j * rest_ij
    return values, first, second


def _multilinear(coeffs: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    """Contract axis p of ``coeffs`` with the leading axis of factors[p].

    Trailing axes of the factors are kept, in factor order.
    """
    out = coeffs
    for mat in factors:
        out = np.tensordot(out, mat, axes=([0], [0]))
    return out


def evaluate(f: PSTensor, t: VectorTuple) -> complex:
    """f(v_1, ..., v_k) = Σ_α c_α Π_p v_p^{α_p}."""
    _check_tuple(f.shape, t)
    mats = [monomial_values(v, factor.degree) for v, factor in zip(t, f.shape.factors)]
    return complex(_multilinear(f.coeffs, mats))


def gradient_contraction(f: PSTensor, t: VectorTuple, p: int) -> np.ndarray:
    """The vector (∂f/∂x_{p,i}(t))_i.

    In terms of the Frobenius form q this is d_p times the contraction of f
    against v_1^{d_1} ⊗ ... ⊗ v_p^{d_p - 1} ⊗ ... ⊗ v_k^{d_k}: for every w,
    ∇_p f(t)·w = d_p · q(f, v_1^{d_1} ⊗ ... ⊗ v_p^{d_p-1}w ⊗ ... ⊗ v_k^{d_k}).
    """
    factor = _check_factor(f.shape, p)
    if factor.degree == 0:
        raise ValueError("cannot differentiate degree 0")
    _check_tuple(f.shape, t)
    mats = []
    for q, (v, fq) in enumerate(zip(t, f.shape.factors)):
        values, first, _ = monomial_jet(v, fq.degree)
        mats.append(first if q == p else values)
    return _multilinear(f.coeffs, mats)


def gradient_hessian(f: PSTensor, t: VectorTuple) -> Tuple[List[np.ndarray], np.ndarray]:
    """All partial gradients ∇_p f(t) and the full Hessian in the stacked coordinates of t.

    Degree-zero factors contribute zero blocks.
    """
    _check_tuple(f.shape, t)
    jets = [monomial_jet(v, fq.degree) for v, fq in zip(t, f.shape.factors)]
    values = [jet[0] for jet in jets]
    offsets = np.concatenate([[0], np.cumsum(t.dims)])
    hessian = np.zeros((offsets[-1], offsets[-1]), dtype=complex)
    gradients = []
    for p in range(t.k):
        mats = list(values)
        mats[p] = jets[p][1]
        gradients.append(_multilinear(f.coeffs, mats))
        mats[p] = jets[p][2]
        hessian[offsets[p]:offsets[p + 1], offsets[p]:offsets[p + 1]] = _multilinear(f.coeffs, mats)
        for q in range(p + 1, t.k):
            mats = list(values)
            mats[p] = jets[p][1]
            mats[q] = jets[q][1]
            block = _multilinear(f.coeffs, mats)
            hessian[offsets[p]:offsets[p + 1], offsets[q]:offsets[q + 1]] = block
            hessian[offsets[q]:offsets[q + 1], offsets[p]:offsets[p + 1]] = block.T
    return gradients, hessian


@lru_cache(maxsize=None)
def _multiplication_stack(dim: int, degree: int) -> np.ndarray:
    return np.stack([_multiplication_matrix(dim, degree, j) for j in range(dim)])


def linear_form_power(v: np.ndarray, degree: int) -> np.ndarray:
    """Coefficients of (Σ_j v_j x_j)^degree in the basis of Sym^degree."""
    v = np.asarray(v, dtype=complex)
    coeffs = np.ones(1, dtype=complex)
    for e in range(degree):
        coeffs = np.einsum("j,jab,b->a", v, _multiplication_stack(v.size, e), coeffs)
    return coeffs


def rank_one(t: VectorTuple, shape: Shape) -> PSTensor:
    """v_1^{d_1} ⊗ ... ⊗ v_k^{d_k}, i.e. the product of the powers of the linear forms v_p·x_p."""
    _check_tuple(shape, t)
    parts = [linear_form_power(v, factor.degree) for v, factor in zip(t, shape.factors)]
    return PSTensor(shape, reduce(np.multiply.outer, parts))
