"""Dense exterior powers ∧^k W with the Gram-determinant form.

Basis: the wedges e_I = e_{i_1} ∧ ... ∧ e_{i_k} for strictly increasing
I ⊂ {0, ..., n}, in lexicographic order. Signs come from sorting: a wedge of
basis vectors in arbitrary order equals the sign of the sorting permutation
times e_I. The subset basis is orthonormal for q(v_1∧...∧v_k, w_1∧...∧w_k)
= det(q_W(v_i, w_j)), so every Frobenius weight equals 1 here.

Degree 0 is allowed as the scalar part ∧^0 W = C; it only shows up as the
derivative of a degree-1 element.
"""

from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence, Tuple

import numpy as np


@lru_cache(maxsize=None)
def subsets(n_plus_1: int, k: int) -> Tuple[Tuple[int, ...], ...]:
    """Strictly increasing k-subsets of {0, ..., n} in basis order."""
    return tuple(combinations(range(n_plus_1), k))


@lru_cache(maxsize=None)
def _subset_index(n_plus_1: int, k: int) -> dict:
    return {s: idx for idx, s in enumerate(subsets(n_plus_1, k))}


def _sort_sign(indices: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sign of the sorting permutation (0 on repeats) and the sorted tuple."""
    if len(set(indices)) < len(indices):
        return 0, tuple(sorted(indices))
    inversions = sum(1 for a in range(len(indices)) for b in range(a + 1, len(indices)) if indices[a] > indices[b])
    return (-1) ** inversions, tuple(sorted(indices))


class AlternatingTensor:
    """Immutable element of ∧^k C^{n+1}."""

    __slots__ = ("n_plus_1", "k", "coeffs")

    def __init__(self, n_plus_1: int, k: int, coeffs):
        if n_plus_1 < 1:
            raise ValueError("ambient dimension must be positive")
        if not 0 <= k <= n_plus_1:
            raise ValueError(f"exterior power {k} out of range for dimension {n_plus_1}")
        arr = np.array(coeffs, dtype=complex).ravel()
        if arr.size != comb(n_plus_1, k):
            raise ValueError(f"coefficient count {arr.size} does not match C({n_plus_1}, {k})")
        arr.flags.writeable = False
        self.n_plus_1 = n_plus_1
        self.k = k
        self.coeffs = arr

    @classmethod
    def zeros(cls, n_plus_1: int, k: int) -> "AlternatingTensor":
        return cls(n_plus_1, k, np.zeros(comb(n_plus_1, k), dtype=complex))

    @classmethod
    def basis_element(cls, n_plus_1: int, indices: Sequence[int], value: complex = 1.0) -> "AlternatingTensor":
        """value · e_{i_1} ∧ ... ∧ e_{i_k} for indices in any order."""
        sign, ordered = _sort_sign(list(indices))
        out = np.zeros(comb(n_plus_1, len(ordered)), dtype=complex)
        if sign:
            out[_subset_index(n_plus_1, len(ordered))[ordered]] = sign * value
        return cls(n_plus_1, len(ordered), out)

    @classmethod
    def vector(cls, v: Sequence[complex]) -> "AlternatingTensor":
        v = np.asarray(v, dtype=complex).ravel()
        return cls(v.size, 1, v)

    @property
    def space(self) -> Tuple[int, int]:
        return (self.n_plus_1, self.k)

    def like(self, coeffs) -> "AlternatingTensor":
        return AlternatingTensor(self.n_plus_1, self.k, coeffs)

    def _check_same(self, other: "AlternatingTensor") -> None:
        if not isinstance(other, AlternatingTensor) or other.space != self.space:
            raise ValueError("shape mismatch")

    def __add__(self, other: "AlternatingTensor") -> "AlternatingTensor":
        self._check_same(other)
        return self.like(self.coeffs + other.coeffs)

    def __sub__(self, other: "AlternatingTensor") -> "AlternatingTensor":
        self._check_same(other)
        return self.like(self.coeffs - other.coeffs)

    def __neg__(self) -> "AlternatingTensor":
        return self.like(-self.coeffs)

    def __mul__(self, scalar: complex) -> "AlternatingTensor":
        return self.like(self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"AlternatingTensor(∧{self.k} C{self.n_plus_1})"


@lru_cache(maxsize=None)
def _wedge_table(n_plus_1: int, a: int, b: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    left, right, target, sign = [], [], [], []
    index = _subset_index(n_plus_1, a + b)
    for iu, su in enumerate(subsets(n_plus_1, a)):
        for iv, sv in enumerate(subsets(n_plus_1, b)):
            s, ordered = _sort_sign(su + sv)
            if s:
                left.append(iu)
                right.append(iv)
                target.append(index[ordered])
                sign.append(s)
    return (np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
            np.array(target, dtype=np.int64), np.array(sign, dtype=float))


def wedge(u: AlternatingTensor, v: AlternatingTensor) -> AlternatingTensor:
    """u ∧ v; graded-anticommutative, u ∧ v = (-1)^{ab} v ∧ u."""
    if u.n_plus_1 != v.n_plus_1:
        raise ValueError(f"ambient mismatch: C{u.n_plus_1} vs C{v.n_plus_1}")
    if u.k + v.k > u.n_plus_1:
        raise ValueError(f"degree overflow: {u.k} + {v.k} > {u.n_plus_1}")
    left, right, target, sign = _wedge_table(u.n_plus_1, u.k, v.k)
    out = np.zeros(comb(u.n_plus_1, u.k + v.k), dtype=complex)
    np.add.at(out, target, sign * u.coeffs[left] * v.coeffs[right])
    return AlternatingTensor(u.n_plus_1, u.k + v.k, out)


@lru_cache(maxsize=None)
def _derivative_table(n_plus_1: int, k: int, i: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    source, target, sign = [], [], []
    index = _subset_index(n_plus_1, k - 1)
    for idx, s in enumerate(subsets(n_plus_1, k)):
        if i in s:
            pos = s.index(i)
            source.append(idx)
            target.append(index[s[:pos] + s[pos + 1:]])
            sign.append((-1) ** pos)
    return np.array(source, dtype=np.int64), np.array(target, dtype=np.int64), np.array(sign, dtype=float)


def leibniz_derivative(f: AlternatingTensor, i: int) -> AlternatingTensor:
    """∂f/∂x_i ∈ ∧^{k-1}W: e_I ↦ (-1)^{position of i in I} e_{I∖{i}}, zero if i ∉ I."""
    if f.k < 1:
        raise ValueError("cannot differentiate degree 0")
    if not 0 <= i < f.n_plus_1:
        raise ValueError(f"variable index {i} out of range")
    source, target, sign = _derivative_table(f.n_plus_1, f.k, i)
    out = np.zeros(comb(f.n_plus_1, f.k - 1), dtype=complex)
    np.add.at(out, target, sign * f.coeffs[source])
    return AlternatingTensor(f.n_plus_1, f.k - 1, out)


def so_action_ext(f: AlternatingTensor, i: int, j: int) -> AlternatingTensor:
    """D_ij f = ∂f/∂x_i ∧ x_j − ∂f/∂x_j ∧ x_i.

    This is (-1)^{k-1} times the derivation induced by e_ij − e_ji; the sign is
    global, so the span of the D_ij f is 𝔰𝔬(W)·f.
    """
    e_i = AlternatingTensor.basis_element(f.n_plus_1, [i])
    e_j = AlternatingTensor.basis_element(f.n_plus_1, [j])
    return wedge(leibniz_derivative(f, i), e_j) - wedge(leibniz_derivative(f, j), e_i)


def so_generators_ext(f: AlternatingTensor):
    """The C(n+1, 2) generators D_ij f, i < j, spanning 𝔰𝔬(W)·f."""
    from .critical_space import GeneratorSet

    if not 1 <= f.k < f.n_plus_1:
        raise ValueError(f"exterior power must satisfy 1 <= k <= n, got k={f.k}, n+1={f.n_plus_1}")
    labels = list(combinations(range(f.n_plus_1), 2))
    gens = [so_action_ext(f, i, j) for i, j in labels]
    return GeneratorSet(generators=gens, labels=[(0, i, j) for i, j in labels])


def gram_inner(u: AlternatingTensor, v: AlternatingTensor) -> complex:
    """q(u, v) = Σ_I c_I(u) c_I(v); on decomposables the Gram determinant det(q_W(u_i, v_j))."""
    if u.space != v.space:
        raise ValueError(f"shape mismatch: {u!r} vs {v!r}")
    return complex(np.dot(u.coeffs, v.coeffs))


def decomposable(vs: Sequence[Sequence[complex]]) -> AlternatingTensor:
    """v_1 ∧ ... ∧ v_k via the maximal minors of the k × (n+1) matrix of the vectors."""
    mat = np.atleast_2d(np.asarray(vs, dtype=complex))
    k, n_plus_1 = mat.shape
    if k > n_plus_1:
        raise ValueError(f"degree overflow: {k} vectors in C{n_plus_1}")
    cols = np.array(subsets(n_plus_1, k), dtype=np.int64)
    minors = np.linalg.det(np.transpose(mat[:, cols], (1, 0, 2)))
    return AlternatingTensor(n_plus_1, k, minors)


def tangent_frame(vs: Sequence[Sequence[complex]]) -> np.ndarray:
    """Rows spanning the tangent space of the Grassmann cone at v_1 ∧ ... ∧ v_k.

    Row (s, w) is v_1 ∧ ... ∧ e_w (slot s) ∧ ... ∧ v_k, for s = 1..k and
    w = 0..n, so the frame has k(n+1) rows of length C(n+1, k).
    """
    mat = np.atleast_2d(np.asarray(vs, dtype=complex))
    k, n_plus_1 = mat.shape
    eye = np.eye(n_plus_1, dtype=complex)
    rows = []
    for s in range(k):
        for w in range(n_plus_1):
            replaced = mat.copy()
            replaced[s] = eye[w]
            rows.append(decomposable(replaced).coeffs)
    return np.array(rows)
