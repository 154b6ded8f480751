"""Exact arithmetic in K = Q(t): rational functions, places, valuations.

Polynomials are ``flint.fmpq_poly`` values (coefficients indexed by the
power of ``t``).  A :class:`RationalFunction` stores a coprime pair with a
monic denominator, so equal values have equal representations.

Absolute values are carried as exact logarithms: ``log|f|_v`` is
``-N_v * ord_v(f)`` in units of ``log e``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational
from typing import Iterable, Union

from flint import fmpq, fmpq_poly

__all__ = [
    "RationalFunction",
    "Place",
    "INFINITY",
    "ParseError",
    "ord_at",
    "log_abs",
    "log_plus",
    "support",
    "product_formula_check",
    "parse",
    "as_rf",
    "to_fraction",
    "to_fmpq",
]

Coercible = Union["RationalFunction", int, Fraction, str]


def to_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    return Fraction(int(q.p), int(q.q))


def to_fmpq(q) -> fmpq:
    if isinstance(q, fmpq):
        return q
    if isinstance(q, int):
        return fmpq(q)
    q = Fraction(q)
    return fmpq(q.numerator, q.denominator)


def _poly_key(p: fmpq_poly) -> tuple:
    return tuple(to_fraction(c) for c in p.coeffs())


def _poly_from_key(key: Iterable[Fraction]) -> fmpq_poly:
    return fmpq_poly([to_fmpq(c) for c in key])


class RationalFunction:
    """An element of Q(t) in lowest terms with monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=1, *, _reduced: bool = False):
        if not isinstance(num, fmpq_poly):
            num = fmpq_poly([to_fmpq(num)]) if not isinstance(num, (list, tuple)) else fmpq_poly([to_fmpq(c) for c in num])
        if not isinstance(den, fmpq_poly):
            den = fmpq_poly([to_fmpq(den)]) if not isinstance(den, (list, tuple)) else fmpq_poly([to_fmpq(c) for c in den])
        if not _reduced:
            if den.is_zero():
                raise ZeroDivisionError("rational function with zero denominator")
            if num.is_zero():
                den = fmpq_poly([1])
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = num // g
                    den = den // g
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self.num = num
        self.den = den
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def t(cls) -> "RationalFunction":
        return cls(fmpq_poly([0, 1]), _reduced=True)

    @classmethod
    def from_poly(cls, coeffs) -> "RationalFunction":
        return cls(fmpq_poly([to_fmpq(c) for c in coeffs]), _reduced=True)

    @classmethod
    def parse(cls, text: str) -> "RationalFunction":
        return parse(text)

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() == 0

    def is_polynomial(self) -> bool:
        return self.den.degree() == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return to_fraction(self.num.coeffs()[0]) if not self.num.is_zero() else Fraction(0)

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = as_rf(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-as_rf(other))

    def __rsub__(self, other):
        return as_rf(other) - self

    def __mul__(self, other):
        other = as_rf(other)
        if other.is_zero() or self.is_zero():
            return ZERO
        if other.is_constant():
            c = other.num.coeffs()[0]
            return RationalFunction(self.num * c, self.den, _reduced=True)
        if self.is_constant():
            c = self.num.coeffs()[0]
            return RationalFunction(other.num * c, other.den, _reduced=True)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(t)")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        return self * as_rf(other).inverse()

    def __rtruediv__(self, other):
        return as_rf(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RationalFunction(self.num ** e, self.den ** e, _reduced=True)

    def __call__(self, value):
        """Evaluate at a rational number."""
        value = to_fmpq(value)
        d = self.den(value)
        if d == 0:
            raise ZeroDivisionError(f"{self} has a pole at {value}")
        return to_fraction(self.num(value) / d)

    def substitute(self, g: "RationalFunction") -> "RationalFunction":
        """Return f(g(t))."""
        return _poly_at(self.num, g) / _poly_at(self.den, g)

    # comparison / hashing ---------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            if isinstance(other, (int, Fraction, Rational)):
                other = RationalFunction(other)
            else:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((_poly_key(self.num), _poly_key(self.den)))
        return self._hash

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"

    def __str__(self):
        return format_rf(self)

    @property
    def degree(self) -> int:
        """deg(num) - deg(den); the negative of the order at infinity."""
        if self.is_zero():
            raise ValueError("degree of zero")
        return self.num.degree() - self.den.degree()


ZERO = RationalFunction(0)
ONE = RationalFunction(1)


def _poly_at(p: fmpq_poly, g: RationalFunction) -> RationalFunction:
    acc = ZERO
    for c in reversed(p.coeffs()):
        acc = acc * g + RationalFunction(c)
    return acc


def as_rf(x: Coercible) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, str):
        return parse(x)
    if isinstance(x, fmpq_poly):
        return RationalFunction(x, _reduced=True)
    return RationalFunction(x)


# ---------------------------------------------------------------------------
# places


@dataclass(frozen=True)
class Place:
    """A place of Q(t): a monic irreducible polynomial, or infinity.

    ``key`` holds the monic polynomial's coefficients (low to high); it is
    ``None`` for the infinite place.
    """

    key: tuple | None

    @classmethod
    def finite(cls, p) -> "Place":
        poly = p if isinstance(p, fmpq_poly) else as_rf(p).num
        if isinstance(p, (str, RationalFunction)) and not as_rf(p).is_polynomial():
            raise ValueError("a finite place needs a polynomial")
        if poly.degree() < 1:
            raise ValueError("a finite place needs a polynomial of degree >= 1")
        poly = poly / poly.leading_coefficient()
        _, factors = poly.factor()
        if len(factors) != 1 or factors[0][1] != 1:
            raise ValueError(f"{poly} is not irreducible over Q")
        return cls(_poly_key(poly))

    @property
    def is_infinite(self) -> bool:
        return self.key is None

    @cached_property
    def poly(self) -> fmpq_poly:
        if self.key is None:
            raise ValueError("the infinite place has no defining polynomial")
        return _poly_from_key(self.key)

    @property
    def degree(self) -> int:
        """Local degree N_v."""
        return 1 if self.key is None else len(self.key) - 1

    def uniformizer(self) -> RationalFunction:
        if self.key is None:
            return RationalFunction(1, fmpq_poly([0, 1]), _reduced=True)
        return RationalFunction(self.poly, _reduced=True)

    def sort_key(self):
        if self.key is None:
            return (1, 0, ())
        return (0, self.degree, self.key)

    def __lt__(self, other: "Place") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if self.key is None:
            return "inf"
        return format_poly(self.poly)

    def __repr__(self):
        return f"Place({str(self)!r})"


INFINITY = Place(None)


def _ord_poly(p: fmpq_poly, q: fmpq_poly) -> int:
    n = 0
    while True:
        quo, rem = divmod(p, q)
        if not rem.is_zero():
            return n
        p = quo
        n += 1


def ord_at(f: Coercible, v: Place) -> int:
    """Order of vanishing of f at the place v."""
    f = as_rf(f)
    if f.is_zero():
        raise ValueError("valuation of zero")
    if v.is_infinite:
        return f.den.degree() - f.num.degree()
    p = v.poly
    return _ord_poly(f.num, p) - _ord_poly(f.den, p)


def log_abs(f: Coercible, v: Place) -> Fraction:
    """log|f|_v = -N_v * ord_v(f)."""
    return Fraction(-v.degree * ord_at(f, v))


def log_plus(x: Fraction) -> Fraction:
    return max(Fraction(x), Fraction(0))


@lru_cache(maxsize=4096)
def _irreducible_factors(key: tuple) -> tuple:
    poly = _poly_from_key(key)
    if poly.degree() < 1:
        return ()
    _, factors = poly.factor()
    out = []
    for fac, _ in factors:
        fac = fac / fac.leading_coefficient()
        out.append(Place(_poly_key(fac)))
    return tuple(out)


def places_of_poly(p: fmpq_poly) -> tuple:
    """Finite places dividing the polynomial p."""
    return _irreducible_factors(_poly_key(p))


def support(fs: Iterable[Coercible]) -> set:
    """Places where some f has nonzero order."""
    places = set()
    for f in fs:
        f = as_rf(f)
        if f.is_zero():
            raise ValueError("valuation of zero")
        places.update(places_of_poly(f.num))
        places.update(places_of_poly(f.den))
        if f.num.degree() != f.den.degree():
            places.add(INFINITY)
    return places


def product_formula_check(f: Coercible) -> Fraction:
    """Sum of log|f|_v over all places; always exactly zero."""
    f = as_rf(f)
    return sum((log_abs(f, v) for v in support([f])), Fraction(0))


# ---------------------------------------------------------------------------
# text grammar


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def offset(self) -> int:
        return len(self.text[: self.pos].encode("utf-8"))

    def error(self, msg: str):
        raise ParseError(msg, self.offset())

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in "0123456789":
            self.pos += 1
        if start == self.pos:
            self.error("expected integer")
        return int(self.text[start : self.pos])

    def parse(self) -> RationalFunction:
        if not self.peek():
            self.error("empty expression")
        value = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return value

    def expr(self) -> RationalFunction:
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFunction:
        value = self.unary()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            at = self.offset()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", at)
                value = value / rhs
        return value

    def unary(self) -> RationalFunction:
        ch = self.peek()
        if ch in ("+", "-"):
            self.pos += 1
            value = self.unary()
            return -value if ch == "-" else value
        return self.power()

    def power(self) -> RationalFunction:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            if self.peek() == "-":
                self.error("negative exponent")
            base = base ** self.integer()
        return base

    def atom(self) -> RationalFunction:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            value = self.expr()
            self.take(")")
            return value
        if ch == "t":
            self.pos += 1
            return RationalFunction.t()
        if ch.isdigit():
            return RationalFunction(self.integer())
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unexpected {ch!r}")


def parse(text: str) -> RationalFunction:
    """Parse the grammar ``integers, t, + - * / ^, parentheses``."""
    return _Parser(text).parse()


def _integral_pair(f: RationalFunction):
    """Return (N, D) integer-coefficient lists with f = N/D, D primitive and lc(D) > 0."""
    from math import gcd, lcm

    nc = [to_fraction(c) for c in f.num.coeffs()]
    dc = [to_fraction(c) for c in f.den.coeffs()]
    den_lcm = 1
    for c in nc + dc:
        den_lcm = lcm(den_lcm, c.denominator)
    n_int = [int(c * den_lcm) for c in nc]
    d_int = [int(c * den_lcm) for c in dc]
    g = 0
    for c in n_int + d_int:
        g = gcd(g, c)
    g = g or 1
    return [c // g for c in n_int], [c // g for c in d_int]


def format_poly(p, var: str = "t") -> str:
    """Print a polynomial with rational coefficients, highest power first."""
    coeffs = [to_fraction(c) for c in (p.coeffs() if isinstance(p, fmpq_poly) else p)]
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            if a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a.numerator}*{mono}"
            else:
                body = f"{a.numerator}*{mono}/{a.denominator}"
        terms.append((sign, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += sign + body
    return out


def format_rf(f: RationalFunction) -> str:
    n_int, d_int = _integral_pair(f)
    num = format_poly(n_int)
    if len(d_int) == 1 and d_int[0] == 1:
        return num
    den = format_poly(d_int)
    if sum(1 for c in n_int if c) > 1:
        num = f"({num})"
    plain_power = len(d_int) == 1 or (sum(1 for c in d_int if c) == 1 and d_int[-1] == 1)
    if not plain_power:
        den = f"({den})"
    return f"{num}/{den}"
