"""Truncated completions of Q(t) at a place.

At a finite place p(t) the local parameter is s = t; at infinity it is
s = 1/t with p(s) = s.  The valuation ring O_v is modelled by
Q[s]/(p(s)^c), or, for long orbits, by F_l[s]/(p(s)^c) for a large prime
l.  Valuations read off in F_l agree with those over Q unless l divides
one of the residues being tested; callers cross-check two primes.
"""

from __future__ import annotations

from typing import Sequence

from flint import fmpq_poly, nmod, nmod_poly

from .funcfield import Place, RationalFunction

__all__ = [
    "RESIDUE_PRIMES",
    "PrecisionExhausted",
    "UnluckyPrime",
    "localize",
    "ResidueRing",
]

RESIDUE_PRIMES = (2305843009213693951, 4611686018427387847, 4611686018427387817)


class PrecisionExhausted(ArithmeticError):
    """Every coordinate vanished to the working precision."""


class UnluckyPrime(ArithmeticError):
    """The residue prime divides a denominator of the input."""


def _reverse(p: fmpq_poly) -> fmpq_poly:
    return fmpq_poly(list(reversed(p.coeffs())))


def _strip(a: fmpq_poly, p: fmpq_poly) -> tuple[int, fmpq_poly]:
    k = 0
    while True:
        q, r = divmod(a, p)
        if not r.is_zero():
            return k, a
        a = q
        k += 1


def localize(f: RationalFunction, v: Place) -> tuple[int, fmpq_poly, fmpq_poly]:
    """Write f = pi^k * a(s)/b(s) with a, b in Q[s] prime to p(s)."""
    if f.is_zero():
        raise ValueError("valuation of zero")
    if v.is_infinite:
        return f.den.degree() - f.num.degree(), _reverse(f.num), _reverse(f.den)
    p = v.poly
    ka, a = _strip(f.num, p)
    kb, b = _strip(f.den, p)
    return ka - kb, a, b


class ResidueRing:
    """Arithmetic in O_v / (p^prec), exact over Q or modulo a word-size prime."""

    def __init__(self, place: Place, modulus: int | None = None):
        self.place = place
        self.modulus = modulus
        p = fmpq_poly([0, 1]) if place.is_infinite else place.poly
        self.p = self.poly(p)
        self._pi_powers = [self.poly(fmpq_poly([1]))]

    def poly(self, q: fmpq_poly):
        if self.modulus is None:
            return q
        ell = self.modulus
        coeffs = []
        for c in q.coeffs():
            den = int(c.q) % ell
            if den == 0:
                raise UnluckyPrime(ell)
            coeffs.append(int(c.p) * pow(den, -1, ell) % ell)
        return nmod_poly(coeffs, ell)

    def pi_power(self, e: int):
        while len(self._pi_powers) <= e:
            self._pi_powers.append(self._pi_powers[-1] * self.p)
        return self._pi_powers[e]

    def embed(self, f: RationalFunction, prec: int, shift: int = 0):
        """Image of pi^(-shift) * f in O_v/(p^prec); needs ord_v(f) >= shift."""
        if f.is_zero():
            return self.poly(fmpq_poly([0]))
        k, a, b = localize(f, self.place)
        k -= shift
        if k < 0:
            raise ValueError("element is not integral after the shift")
        if k >= prec:
            return self.poly(fmpq_poly([0]))
        mod = self.pi_power(prec)
        a = self.poly(a) % mod
        b = self.poly(b) % mod
        g, inv, _ = b.xgcd(mod)
        if g.degree() != 0:
            raise UnluckyPrime(self.modulus)
        inv = inv * self._const_inverse(g)
        return (self.pi_power(k) * a * inv) % mod

    def _const_inverse(self, g):
        c = g.coeffs()[0]
        if self.modulus is None:
            return 1 / c
        return nmod(int(c), self.modulus) ** -1

    def valuation(self, x, prec: int) -> int:
        """ord of x, capped at prec (meaning: zero to working precision)."""
        if x.is_zero():
            return prec
        k = 0
        while k < prec:
            q, r = divmod(x, self.p)
            if not r.is_zero():
                return k
            x = q
            k += 1
        return prec

    def shift_down(self, x, e: int):
        return x // self.pi_power(e) if e else x

    def evaluate_forms(self, forms: Sequence[Sequence[tuple[tuple[int, ...], object]]], point: Sequence, prec: int, degree: int) -> list:
        """Evaluate integral forms (pre-embedded coefficients) at a point mod p^prec."""
        mod = self.pi_power(prec)
        powers = []
        for x in point:
            pw = [self.poly(fmpq_poly([1]))]
            for _ in range(degree):
                pw.append((pw[-1] * x) % mod)
            powers.append(pw)
        values = []
        for terms in forms:
            acc = self.poly(fmpq_poly([0]))
            for e, c in terms:
                term = c
                for i, k in enumerate(e):
                    if k:
                        term = (term * powers[i][k]) % mod
                acc = acc + term
            values.append(acc % mod)
        return values
