"""The Frobenius (Bombieri-Weyl) bilinear form on partially symmetric tensors.

In the raw monomial basis the form is diagonal:

    q(f, g) = Σ_α c_α(f) c_α(g) / w(α),    w(α) = Π_p multinomial(d_p; α_p)

so that q(x^d, y^d) = q_W(x, y)^d with q_W = Σ x_i². The form is complex
bilinear, never sesquilinear. The Hermitian norm below only scales residuals
and deduplicates points; no orthogonality test uses it.
"""

from functools import lru_cache, reduce
from math import factorial, prod
from typing import Tuple

import numpy as np

from .tensor_core import PSTensor, Shape, factor_exponents


def multinomial(degree: int, alpha: Tuple[int, ...]) -> int:
    """degree! / Π α_i!, exact."""
    return factorial(degree) // prod(factorial(a) for a in alpha)


@lru_cache(maxsize=None)
def factor_weights(dim: int, degree: int) -> Tuple[int, ...]:
    """Exact multinomial weights of Sym^degree(C^dim) in basis order."""
    return tuple(multinomial(degree, tuple(int(a) for a in row)) for row in factor_exponents(dim, degree))


@lru_cache(maxsize=None)
def frobenius_weights(shape: Shape) -> np.ndarray:
    """w(α) for every basis exponent, as an array of ``shape.array_shape``."""
    parts = [np.array(factor_weights(f.dim, f.degree), dtype=float) for f in shape.factors]
    weights = reduce(np.multiply.outer, parts)
    weights = np.asarray(weights, dtype=float).reshape(shape.array_shape)
    weights.flags.writeable = False
    return weights


def weighted_coordinates(f: PSTensor) -> np.ndarray:
    """Flat coordinates c_α / sqrt(w(α)); q becomes the plain dot product on them."""
    return (f.coeffs / np.sqrt(frobenius_weights(f.shape))).ravel()


def from_weighted_coordinates(shape: Shape, coords: np.ndarray) -> PSTensor:
    weights = frobenius_weights(shape)
    return PSTensor(shape, np.asarray(coords, dtype=complex).reshape(shape.array_shape) * np.sqrt(weights))


def frobenius_inner(f: PSTensor, g: PSTensor) -> complex:
    """q(f, g) = Σ_α c_α(f) c_α(g) / w(α); bilinear and symmetric."""
    if f.shape != g.shape:
        raise ValueError(f"shape mismatch: {f.shape.label()} vs {g.shape.label()}")
    return complex(np.sum(f.coeffs * g.coeffs / frobenius_weights(f.shape)))


def hermitian_norm(f: PSTensor) -> float:
    """sqrt(Σ_α |c_α|² / w(α))."""
    return float(np.linalg.norm(weighted_coordinates(f)))


def q_W(v, w) -> complex:
    """Σ_i v_i w_i, no conjugation."""
    v = np.asarray(v, dtype=complex).ravel()
    w = np.asarray(w, dtype=complex).ravel()
    if v.size != w.size:
        raise ValueError(f"dimension mismatch: {v.size} vs {w.size}")
    return complex(np.dot(v, w))


@lru_cache(maxsize=None)
def _factorial_weights(shape: Shape) -> np.ndarray:
    parts = [
        np.array([prod(factorial(int(a)) for a in row) for row in factor_exponents(f.dim, f.degree)], dtype=float)
        for f in shape.factors
    ]
    weights = np.asarray(reduce(np.multiply.outer, parts), dtype=float).reshape(shape.array_shape)
    weights.flags.writeable = False
    return weights


def apolar_pairing(f: PSTensor, g: PSTensor) -> complex:
    """The differential pairing Σ_α c_α(f) c_α(g) Π_p α_p!.

    This is what ``diff(f, g)`` computes for symmetric forms; it equals
    Π_p d_p! · frobenius_inner(f, g).
    """
    if f.shape != g.shape:
        raise ValueError(f"shape mismatch: {f.shape.label()} vs {g.shape.label()}")
    return complex(np.sum(f.coeffs * g.coeffs * _factorial_weights(f.shape)))
