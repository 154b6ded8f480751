"""Weil heights on projective space over Q(t) and local heights of subschemes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from flint import fmpq_poly

from .forms import MPoly
from .funcfield import (
    INFINITY,
    Place,
    RationalFunction,
    as_rf,
    log_abs,
    ord_at,
    support,
)

__all__ = [
    "ProjPoint",
    "AffineChartSubscheme",
    "weil_height",
    "local_height_subscheme",
    "boundary_height_ratd",
    "log_norm",
    "min_ord",
    "unit_lift",
]


class ProjPoint:
    """A point of P^N(K); equality is up to a K^x scalar."""

    __slots__ = ("coords", "_canon")

    def __init__(self, coords: Sequence):
        coords = tuple(as_rf(c) for c in coords)
        if all(c.is_zero() for c in coords):
            raise ValueError("all coordinates are zero")
        self.coords = coords
        self._canon = None

    @property
    def dimension(self) -> int:
        return len(self.coords) - 1

    def canonical(self) -> tuple[RationalFunction, ...]:
        """Integral representative with gcd 1 in Q[t], first nonzero entry monic."""
        if self._canon is None:
            common = fmpq_poly([1])
            for c in self.coords:
                common = common * (c.den // common.gcd(c.den))
            polys = [c.num * (common // c.den) for c in self.coords]
            g = fmpq_poly([0])
            for p in polys:
                g = g.gcd(p) if not g.is_zero() else p
            polys = [p // g for p in polys]
            lead = next(p for p in polys if not p.is_zero()).leading_coefficient()
            self._canon = tuple(RationalFunction(p / lead, _reduced=True) for p in polys)
        return self._canon

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def scaled(self, lam) -> "ProjPoint":
        lam = as_rf(lam)
        return ProjPoint([lam * c for c in self.coords])

    def __str__(self):
        return "[" + " : ".join(str(c) for c in self.coords) + "]"

    __repr__ = __str__

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coords]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "ProjPoint":
        return cls([as_rf(s) for s in data])


def min_ord(values: Sequence[RationalFunction], v: Place) -> int | float:
    """min_i ord_v(x_i) over the nonzero entries (inf when all vanish)."""
    return min((ord_at(x, v) for x in values if not x.is_zero()), default=math.inf)


def unit_lift(coords: Sequence[RationalFunction], v: Place) -> list[RationalFunction]:
    """Rescale by a power of the uniformizer so the max coordinate is a v-unit."""
    m = min_ord(coords, v)
    if m == 0:
        return list(coords)
    pi = v.uniformizer() ** (-m)
    return [c * pi for c in coords]


def weil_height(P: ProjPoint) -> Fraction:
    """sum over places of max_i log|x_i|_v."""
    coords = P.canonical()
    nonzero = [c for c in coords if not c.is_zero()]
    total = Fraction(0)
    for v in support(nonzero) | {INFINITY}:
        total += max(log_abs(c, v) for c in nonzero)
    return total


@dataclass(frozen=True)
class AffineChartSubscheme:
    """Closed subscheme of an affine chart cut out by polynomials over Q."""

    equations: tuple[MPoly, ...]

    def __post_init__(self):
        if not self.equations:
            raise ValueError("need at least one cutting function")
        for f in self.equations:
            if f.is_zero():
                raise ValueError("cutting functions must be nonzero")
            if not all(c.is_constant() for c in f.coefficients()):
                raise ValueError("cutting functions must have constant coefficients")

    @cached_property
    def nvars(self) -> int:
        return self.equations[0].nvars


def local_height_subscheme(Y: AffineChartSubscheme, x: Sequence, v: Place) -> Fraction | float:
    """min_i log|f_i(x)|_v^{-1}; +inf when x lies on Y."""
    x = [as_rf(c) for c in x]
    for c in x:
        if not c.is_zero() and log_abs(c, v) > 0:
            raise ValueError("point not in the unit polydisc at v")
    best: Fraction | float = math.inf
    for f in Y.equations:
        value = f(x)
        if value.is_zero():
            continue
        best = min(best, -log_abs(value, v))
    return best


def log_norm(F, v: Place) -> Fraction:
    """max over the coefficients of a map of log|c|_v."""
    return max(log_abs(c, v) for c in F.coefficients())


def boundary_height_ratd(F, v: Place) -> Fraction:
    """-log|Res(F)|_v + (N+1) (d^2)^N log||F||_v."""
    res = F.resultant
    if res.is_zero():
        raise ValueError("degenerate map: zero resultant")
    N, d = F.N, F.d
    return -log_abs(res, v) + (N + 1) * (d * d) ** N * log_norm(F, v)
