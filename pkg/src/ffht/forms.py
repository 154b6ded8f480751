"""Multivariate polynomials with coefficients in Q(t).

Monomials are exponent tuples.  Terms are kept sorted in descending
lexicographic order of exponents (x0 > x1 > ... ), which is also the
graded-lex order on forms of a fixed degree.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from .funcfield import ONE, ZERO, RationalFunction, as_rf

__all__ = ["MPoly", "monomials", "monomial_str"]


def monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples of the given total degree, descending lex order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


_VARS3 = ("x", "y", "z")


def monomial_str(e: Sequence[int], names: Sequence[str] | None = None) -> str:
    if names is None:
        names = _VARS3 if len(e) <= 3 else [f"x{i}" for i in range(len(e))]
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts) if parts else "1"


class MPoly:
    """A polynomial in ``nvars`` variables over K = Q(t)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], object] | None = None):
        self.nvars = nvars
        clean = {}
        for e, c in (terms or {}).items():
            c = as_rf(c)
            if not c.is_zero():
                if len(e) != nvars:
                    raise ValueError(f"monomial {e} has wrong arity")
                clean[tuple(e)] = c
        self.terms = dict(sorted(clean.items(), reverse=True))

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): ONE})

    @classmethod
    def constant(cls, nvars: int, c) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, e: Sequence[int], c=1) -> "MPoly":
        return cls(len(e), {tuple(e): c})

    # structure --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def coefficient(self, e) -> RationalFunction:
        return self.terms.get(tuple(e), ZERO)

    def coefficients(self) -> list[RationalFunction]:
        return list(self.terms.values())

    def leading_monomial(self) -> tuple[int, ...]:
        return next(iter(self.terms))

    # arithmetic -------------------------------------------------------------
    def __add__(self, other: "MPoly") -> "MPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return MPoly(self.nvars, out)

    def __neg__(self) -> "MPoly":
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + (-other)

    def __mul__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            c = as_rf(other)
            return MPoly(self.nvars, {e: v * c for e, v in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MPoly":
        result = MPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    # evaluation -------------------------------------------------------------
    def __call__(self, point: Sequence) -> RationalFunction:
        point = [as_rf(p) for p in point]
        powers = [_powers(p, max((e[i] for e in self.terms), default=0)) for i, p in enumerate(point)]
        acc = ZERO
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    term = term * powers[i][k]
            acc = acc + term
        return acc

    def compose(self, subs: Sequence["MPoly"]) -> "MPoly":
        """Substitute the i-th variable by ``subs[i]``."""
        nv = subs[0].nvars
        maxdeg = [max((e[i] for e in self.terms), default=0) for i in range(self.nvars)]
        powers = []
        for i, s in enumerate(subs):
            pw = [MPoly.constant(nv, 1)]
            for _ in range(maxdeg[i]):
                pw.append(pw[-1] * s)
            powers.append(pw)
        acc = MPoly(nv)
        for e, c in self.terms.items():
            term = MPoly.constant(nv, c)
            for i, k in enumerate(e):
                if k:
                    term = term * powers[i][k]
            acc = acc + term
        return acc

    def digits(self) -> int:
        """Rough size: total decimal digits of all coefficient data."""
        total = 0
        for c in self.terms.values():
            for q in list(c.num.coeffs()) + list(c.den.coeffs()):
                total += len(str(q))
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = monomial_str(e) if self.nvars <= 3 else monomial_str(e, [f"x{i}" for i in range(self.nvars)])
            if mono == "1":
                parts.append(f"({c})")
            elif c == ONE:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    __repr__ = __str__

    # serialization ------------------------------------------------------------
    def to_records(self) -> list[dict]:
        return [{"monomial": list(e), "coeff": str(c)} for e, c in self.terms.items()]

    @classmethod
    def from_records(cls, nvars: int, records: Iterable[Mapping]) -> "MPoly":
        terms: dict = {}
        for rec in records:
            e = tuple(int(k) for k in rec["monomial"])
            c = as_rf(rec["coeff"])
            terms[e] = terms[e] + c if e in terms else c
        return cls(nvars, terms)


def _powers(x: RationalFunction, k: int) -> list[RationalFunction]:
    out = [ONE]
    for _ in range(k):
        out.append(out[-1] * x)
    return out
