"""Closed-form ED degrees and flag-variety invariants, in exact arithmetic.

A weight of SL(n+1) is given in fundamental-weight coordinates a = (a_1, ..., a_n).
For the positive root e_i - e_j (1 <= i < j <= n+1) its pairing with λ is the
partial sum a_i + ... + a_{j-1}.
"""

from fractions import Fraction
from math import comb, factorial, prod
from typing import Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DominantWeight(BaseModel):
    """Dominant weight λ = Σ a_i ω_i of SL(n+1), a_i >= 0."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    a: Tuple[int, ...]

    @model_validator(mode="after")
    def _check(self) -> "DominantWeight":
        if len(self.a) != self.n:
            raise ValueError(f"need {self.n} coefficients, got {len(self.a)}")
        if any(x < 0 for x in self.a):
            raise ValueError("weight coefficients must be nonnegative")
        return self


class FlagWeight(DominantWeight):
    """Strictly dominant weight, embedding the complete flag variety F_n."""

    @model_validator(mode="after")
    def _strict(self) -> "FlagWeight":
        if any(x < 1 for x in self.a):
            raise ValueError("weight coefficients must be at least 1")
        return self


def binary_segre_veronese_eddegree(degrees: Sequence[int]) -> int:
    """k!·d_1···d_k, the ED degree of the Segre–Veronese embedding of (P^1)^k."""
    degrees = list(degrees)
    if not degrees or any(d < 1 for d in degrees):
        raise ValueError("degrees must be a nonempty list of positive integers")
    return factorial(len(degrees)) * prod(degrees)


def _root_pairs(n: int):
    return [(i, j) for i in range(1, n + 2) for j in range(i + 1, n + 2)]


def _exact_int(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise RuntimeError(f"{what} is not an integer: {value}")
    return value.numerator


def _weyl_product(n: int, a: Sequence[int]) -> int:
    """Weyl dimension formula: Π_{i<j} ⟨λ+ρ, e_i-e_j⟩ / ⟨ρ, e_i-e_j⟩."""
    value = Fraction(1)
    for i, j in _root_pairs(n):
        value *= Fraction(sum(a[l - 1] + 1 for l in range(i, j)), j - i)
    return _exact_int(value, "Weyl dimension")


def flag_weyl_dimension(w: DominantWeight) -> int:
    """dim V_λ; zero coefficients are allowed, so V_0 is the trivial representation."""
    return _weyl_product(w.n, w.a)


def flag_hilbert(w: DominantWeight, t: int) -> int:
    """h(t) = dim H^0(F_n, L^t) = dim V_{tλ}."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return _weyl_product(w.n, [t * x for x in w.a])


def flag_dimension(n: int) -> int:
    """dim F_n = C(n+1, 2)."""
    return comb(n + 1, 2)


def so_dimension(m: int) -> int:
    """dim SO(m) = C(m, 2)."""
    return comb(m, 2)


def flag_degree(w: FlagWeight) -> int:
    """C(n+1,2)! · Π_{i<j} (a_i + ... + a_{j-1}) / (j - i), the degree of F_n under λ.

    For n = 2 this is 3ab(a+b); for a = (1, ..., 1) it is C(n+1,2)!.
    """
    value = Fraction(factorial(flag_dimension(w.n)))
    for i, j in _root_pairs(w.n):
        value *= Fraction(sum(w.a[l - 1] for l in range(i, j)), j - i)
    return _exact_int(value, "flag degree")


def flag_euler_characteristic(n: int) -> int:
    """χ(F_n) = (n+1)!, the order of the Weyl group."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return factorial(n + 1)


def hilbert_top_difference(w: FlagWeight) -> int:
    """The N-th forward difference of h at 0, N = dim F_n; equals the degree."""
    top = flag_dimension(w.n)
    return sum((-1) ** (top - s) * comb(top, s) * flag_hilbert(w, s) for s in range(top + 1))


def hilbert_leading_coefficient(w: FlagWeight) -> Fraction:
    return Fraction(hilbert_top_difference(w), factorial(flag_dimension(w.n)))
