"""Explicit constants: Zarhin's trick, polarization degrees, Hilbert scheme sizes."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, isqrt
from typing import Sequence

from flint import fmpq, fmpq_poly

from .funcfield import ParseError, RationalFunction, parse

__all__ = [
    "HilbertPolynomial",
    "ZarhinMatrix",
    "NotHilbertPolynomial",
    "four_square",
    "zarhin_matrix",
    "least_s",
    "polarization_degrees",
    "fixed_locus_bound",
    "regularity_bound",
    "gotzmann_decomposition",
    "gotzmann_number",
    "hilbert_embedding_sizes",
    "deligne_bound",
    "abelian_section_dim",
]

INAPPLICABLE = "inapplicable"


class NotHilbertPolynomial(ValueError):
    def __init__(self, msg: str = "not a Hilbert polynomial of a subscheme"):
        super().__init__(msg)


def _binom_poly(shift: int, b: int) -> fmpq_poly:
    """binom(T + shift, b) as a polynomial in T."""
    p = fmpq_poly([1])
    for k in range(b):
        p = p * fmpq_poly([shift - k, 1])
    return p / factorial(b)


class HilbertPolynomial:
    """A numerical polynomial P(T) with rational coefficients."""

    __slots__ = ("poly",)

    def __init__(self, coeffs: Sequence | fmpq_poly):
        self.poly = coeffs if isinstance(coeffs, fmpq_poly) else fmpq_poly([fmpq(Fraction(c).numerator, Fraction(c).denominator) for c in coeffs])
        if self.poly.is_zero() or self.poly.leading_coefficient() <= 0:
            raise NotHilbertPolynomial("leading coefficient must be positive")
        # integer valued on a window is enough to certify a numerical polynomial
        for T in range(self.poly.degree() + 1):
            if self.poly(T).q != 1:
                raise NotHilbertPolynomial("polynomial is not integer valued")

    @classmethod
    def parse(cls, text: str) -> "HilbertPolynomial":
        # accept the usual shorthand 2T for 2*T
        f = parse(re.sub(r"(\d)\s*(?=[T(])", r"\1*", text).replace("T", "t"))
        if not f.is_polynomial():
            raise ParseError("Hilbert polynomial must be a polynomial in T", 0)
        return cls(f.num)

    def __call__(self, T: int) -> int:
        v = self.poly(T)
        return int(v.p) // int(v.q)

    @property
    def degree(self) -> int:
        return self.poly.degree()

    def __str__(self):
        return str(RationalFunction(self.poly)).replace("t", "T")


def four_square(s: int) -> tuple[int, int, int, int]:
    """Lexicographically least (a1 <= a2 <= a3 <= a4) with sum of squares s."""
    if s < 1:
        raise ValueError("s must be positive")
    for a1 in range(isqrt(s // 4) + 1):
        r1 = s - a1 * a1
        for a2 in range(a1, isqrt(r1 // 3) + 1):
            r2 = r1 - a2 * a2
            for a3 in range(a2, isqrt(r2 // 2) + 1):
                r3 = r2 - a3 * a3
                a4 = isqrt(r3)
                if a4 * a4 == r3 and a4 >= a3:
                    return (a1, a2, a3, a4)
    raise AssertionError("Lagrange's theorem failed")  # pragma: no cover


@dataclass(frozen=True)
class ZarhinMatrix:
    rows: tuple[tuple[int, ...], ...]
    s: int

    def gram(self) -> list[list[int]]:
        return [[sum(a * b for a, b in zip(r1, r2)) for r2 in self.rows] for r1 in self.rows]

    def det(self) -> int:
        from flint import fmpz_mat

        return int(fmpz_mat([list(r) for r in self.rows]).det())


def zarhin_matrix(a1: int, a2: int, a3: int, a4: int) -> ZarhinMatrix:
    """Quaternion multiplication matrix with I * I^T = s * Id."""
    # left multiplication by a1 + a2 i + a3 j + a4 k; the last row's final sign
    # is +a1, which is what makes the rows orthogonal
    rows = (
        (a1, -a2, -a3, -a4),
        (a2, a1, a4, -a3),
        (a3, -a4, a1, a2),
        (a4, a3, -a2, a1),
    )
    s = a1 * a1 + a2 * a2 + a3 * a3 + a4 * a4
    m = ZarhinMatrix(rows, s)
    gram = m.gram()
    assert all(gram[i][j] == (s if i == j else 0) for i in range(4) for j in range(4))
    return m


def least_s(d: int) -> int:
    """Least s >= 1 with s = -1 mod d."""
    if d < 1:
        raise ValueError("d must be positive")
    return d - 1 if d > 1 else 1


def polarization_degrees(d: int, g: int) -> tuple[int, int]:
    """(deg A', bound on deg A'^t) for a degree-d polarization in dimension g."""
    if d < 1 or g < 1:
        raise ValueError("d and g must be positive")
    degA = 2 * d * factorial(g)
    return degA, (least_s(d) + 1) * degA


def fixed_locus_bound(orderG: int, orderGab: int, d: int, degL: int) -> int:
    if min(orderG, orderGab, degL) < 1 or d < 0:
        raise ValueError("inputs must be positive")
    return orderGab * orderG**d * degL


def regularity_bound(n: int, r: int, d: int) -> int:
    """d^((n-1) 2^(r-1))."""
    if r < 1 or n < 2 or d < 1:
        raise ValueError("need r >= 1, n >= 2, d >= 1")
    return d ** ((n - 1) * 2 ** (r - 1))


def gotzmann_decomposition(P: HilbertPolynomial, max_terms: int = 10**5) -> list[int]:
    """Parameters b_1 >= ... >= b_s with P(T) = sum_i binom(T + b_i - i + 1, b_i)."""
    rest = P.poly
    out: list[int] = []
    while not rest.is_zero():
        if rest.leading_coefficient() < 0 or len(out) >= max_terms:
            raise NotHilbertPolynomial()
        b = rest.degree()
        i = len(out) + 1
        rest = rest - _binom_poly(b - i + 1, b)
        out.append(b)
    return out


def gotzmann_number(P: HilbertPolynomial) -> int:
    return len(gotzmann_decomposition(P))


def expand_decomposition(bs: Sequence[int]) -> HilbertPolynomial:
    total = fmpq_poly([0])
    for i, b in enumerate(bs, start=1):
        total = total + _binom_poly(b - i + 1, b)
    return HilbertPolynomial(total)


def hilbert_embedding_sizes(t: int, r: int, P: HilbertPolynomial) -> tuple[int, int]:
    """(binom(t+r, r) - P(t), binom(t+r+1, r) - P(t+1) + 1)."""
    g = gotzmann_number(P)
    if t < g:
        raise ValueError(f"t = {t} is below the Gotzmann number {g}")
    return comb(t + r, r) - P(t), comb(t + r + 1, r) - P(t + 1) + 1


def deligne_bound(g: int, gB: int, S: int) -> Fraction | str:
    """(g/2)(2 g(B) - 2 + |S|), or 'inapplicable' when the bracket is negative."""
    if min(g, gB, S) < 0:
        raise ValueError("inputs must be nonnegative")
    bracket = 2 * gB - 2 + S
    if bracket < 0:
        return INAPPLICABLE
    return Fraction(g * bracket, 2)


def abelian_section_dim(degL: int, g: int, n: int) -> int:
    """dim H^0(L^n) = deg_L n^g / g!."""
    num = degL * n**g
    q, r = divmod(num, factorial(g))
    if r:
        raise ValueError(f"deg_L = {degL} is not a valid degree for a {g}-dimensional abelian variety")
    return q
