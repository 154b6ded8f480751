"""Elliptic curves over Q(t).

Local heights use the normalization in which, at a place of good
reduction on a minimal model, lambda_v(P) = 1/2 max(0, -ord x) + ord(Delta)/12
(valuation units, multiplied by N_v).  This is model independent, sums to
the Neron-Tate height for the divisor (O), and the O(1) height of the plane
cubic is three times it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Sequence

from flint import fmpq_poly, fmpz_mpoly_ctx, fmpz_poly
from flint.utils.flint_exceptions import DomainError

from . import dynsys
from ._doubling import DOUBLING
from .forms import MPoly
from .funcfield import ONE, ZERO, Place, RationalFunction, as_rf, ord_at, support
from .projheights import ProjPoint

__all__ = [
    "SingularCurve",
    "CurvePoint",
    "O",
    "WeierstrassCurve",
    "ReductionData",
    "FaltingsHeight",
    "TorsionResult",
    "duplication_extension",
    "canonical_height_dyn",
    "canonical_height_local",
    "local_height",
    "component_index",
    "hindry_silverman_check",
    "torsion_points",
    "faltings_height",
    "arakelov_check",
]


class SingularCurve(ValueError):
    def __init__(self):
        super().__init__("singular curve")


class NotOnCurve(ValueError):
    pass


class DuplicationSearchFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class CurvePoint:
    x: RationalFunction | None = None
    y: RationalFunction | None = None

    @property
    def is_zero(self) -> bool:
        return self.x is None

    def projective(self) -> ProjPoint:
        if self.is_zero:
            return ProjPoint([0, 1, 0])
        return ProjPoint([self.x, self.y, ONE])

    def to_json(self):
        return "O" if self.is_zero else [str(self.x), str(self.y)]

    @classmethod
    def from_json(cls, data) -> "CurvePoint":
        if data == "O":
            return O
        x, y = data
        return cls(as_rf(x), as_rf(y))

    def __str__(self):
        return "O" if self.is_zero else f"({self.x}, {self.y})"

    __repr__ = __str__


O = CurvePoint()


@dataclass(frozen=True)
class ReductionData:
    place: Place
    kind: str  # "Good" | "Multiplicative" | "Additive"
    m: int | None
    ord_delta_min: int
    ord_j: int | float
    potential: str  # "Good" | "Multiplicative"

    @property
    def label(self) -> str:
        return f"Multiplicative({self.m})" if self.kind == "Multiplicative" else self.kind

    def to_json(self) -> dict:
        return {
            "place": str(self.place),
            "type": self.label,
            "ord_delta_min": self.ord_delta_min,
            "ord_j": self.ord_j if self.ord_j != float("inf") else "inf",
            "potential": self.potential,
        }


@dataclass(frozen=True)
class _LocalModel:
    """Minimal short model y^2 = x^3 + A x + B at one place."""

    place: Place
    A: RationalFunction
    B: RationalFunction
    shift: int  # model scaled by pi^shift
    ord_delta: int


def _ord(f: RationalFunction, v: Place) -> int | float:
    return float("inf") if f.is_zero() else ord_at(f, v)


class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q(t)."""

    def __init__(self, a1=0, a2=0, a3=0, a4=0, a6=0):
        self.a1, self.a2, self.a3, self.a4, self.a6 = (as_rf(a) for a in (a1, a2, a3, a4, a6))
        a1, a2, a3, a4, a6 = self.ainvs
        self.b2 = a1 * a1 + 4 * a2
        self.b4 = 2 * a4 + a1 * a3
        self.b6 = a3 * a3 + 4 * a6
        self.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        self.c4 = b2 * b2 - 24 * b4
        self.c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
        self.disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        if self.disc.is_zero():
            raise SingularCurve()
        self.j = self.c4**3 / self.disc
        assert self.c4**3 - self.c6**2 == 1728 * self.disc
        assert 4 * b8 == b2 * b6 - b4 * b4

    @property
    def ainvs(self) -> tuple[RationalFunction, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def __eq__(self, other):
        return isinstance(other, WeierstrassCurve) and self.ainvs == other.ainvs

    def __hash__(self):
        return hash(self.ainvs)

    def __str__(self):
        names = ("a1", "a2", "a3", "a4", "a6")
        return "[" + ", ".join(f"{n}={a}" for n, a in zip(names, self.ainvs)) + "]"

    __repr__ = __str__

    def to_json(self) -> dict:
        return {n: str(a) for n, a in zip(("a1", "a2", "a3", "a4", "a6"), self.ainvs)}

    @classmethod
    def from_json(cls, data: dict) -> "WeierstrassCurve":
        return cls(*(as_rf(data.get(n, "0")) for n in ("a1", "a2", "a3", "a4", "a6")))

    def substitute(self, g) -> "WeierstrassCurve":
        """The curve with t replaced by g(t)."""
        g = as_rf(g)
        return WeierstrassCurve(*(a.substitute(g) for a in self.ainvs))

    @property
    def is_isotrivial(self) -> bool:
        return self.j.is_constant()

    # points -----------------------------------------------------------------
    def equation(self, x, y) -> RationalFunction:
        a1, a2, a3, a4, a6 = self.ainvs
        return y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)

    def contains(self, P: CurvePoint) -> bool:
        return P.is_zero or self.equation(P.x, P.y).is_zero()

    def point(self, x, y) -> CurvePoint:
        P = CurvePoint(as_rf(x), as_rf(y))
        if not self.contains(P):
            raise NotOnCurve(f"{P} is not on the curve")
        return P

    def neg(self, P: CurvePoint) -> CurvePoint:
        if P.is_zero:
            return P
        return CurvePoint(P.x, -P.y - self.a1 * P.x - self.a3)

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        if P.is_zero:
            return Q
        if Q.is_zero:
            return P
        a1, a2, a3, a4, a6 = self.ainvs
        x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
        if x1 == x2:
            den = y1 + y2 + a1 * x2 + a3
            if den.is_zero():
                return O
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
            nu = (-(x1**3) + a4 * x1 + 2 * a6 - a3 * y1) / den
        else:
            lam = (y2 - y1) / (x2 - x1)
            nu = (y1 * x2 - y2 * x1) / (x2 - x1)
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(lam + a1) * x3 - nu - a3
        return CurvePoint(x3, y3)

    def sub(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        return self.add(P, self.neg(Q))

    def mul(self, n: int, P: CurvePoint) -> CurvePoint:
        if n < 0:
            return self.mul(-n, self.neg(P))
        acc, base = O, P
        while n:
            if n & 1:
                acc = self.add(acc, base)
            n >>= 1
            if n:
                base = self.add(base, base)
        return acc

    def order(self, P: CurvePoint, bound: int) -> int | None:
        """Exact order of P if it is at most ``bound``."""
        Q = P
        for n in range(1, bound + 1):
            if Q.is_zero:
                return n
            Q = self.add(Q, P)
        return None

    # reduction ----------------------------------------------------------------
    @cached_property
    def short_A(self) -> RationalFunction:
        return -27 * self.c4

    @cached_property
    def short_B(self) -> RationalFunction:
        return -54 * self.c6

    def short_coords(self, P: CurvePoint) -> tuple[RationalFunction, RationalFunction]:
        """Image on Y^2 = X^3 - 27 c4 X - 54 c6."""
        return 36 * P.x + 3 * self.b2, 108 * (2 * P.y + self.a1 * P.x + self.a3)

    def local_model(self, v: Place) -> _LocalModel:
        oA, oB = _ord(self.short_A, v), _ord(self.short_B, v)
        k = min(oA // 4 if oA != float("inf") else oB, oB // 6 if oB != float("inf") else oA)
        k = int(k)
        pi = v.uniformizer()
        A = self.short_A / pi ** (4 * k)
        B = self.short_B / pi ** (6 * k)
        return _LocalModel(v, A, B, k, ord_at(self.disc, v) - 12 * k)

    def reduction_type(self, v: Place) -> ReductionData:
        model = self.local_model(v)
        n = model.ord_delta
        ord_j = _ord(self.j, v)
        potential = "Multiplicative" if ord_j < 0 else "Good"
        if n == 0:
            return ReductionData(v, "Good", None, 0, ord_j, "Good")
        if _ord(model.A, v) == 0:
            return ReductionData(v, "Multiplicative", n, n, ord_j, potential)
        return ReductionData(v, "Additive", None, n, ord_j, potential)

    @cached_property
    def candidate_places(self) -> list[Place]:
        return sorted(support([f for f in (self.disc, self.c4, self.c6) if not f.is_zero()]))

    @cached_property
    def reduction_table(self) -> list[ReductionData]:
        return [self.reduction_type(v) for v in self.candidate_places]

    def bad_reduction(self) -> list[ReductionData]:
        return [r for r in self.reduction_table if r.kind != "Good"]


# ---------------------------------------------------------------------------
# local and global heights


def _lambda(curve: WeierstrassCurve, P: CurvePoint, v: Place) -> Fraction:
    """lambda_v(P) in valuation units (before the N_v weight)."""
    model = curve.local_model(v)
    X, Y = curve.short_coords(P)
    pi = v.uniformizer()
    X = X / pi ** (2 * model.shift)
    Y = Y / pi ** (3 * model.shift)
    A, B = model.A, model.B
    n = model.ord_delta
    base = Fraction(n, 12)
    oX = _ord(X, v)
    if oX < 0:
        return Fraction(-oX, 2) + base
    if not (_ord(3 * X * X + A, v) > 0 and _ord(2 * Y, v) > 0):
        return base
    if _ord(A, v) == 0:
        i = Fraction(min(_ord(Y, v), Fraction(n, 2)))
        return base - i * (n - i) / (2 * n)
    psi2 = _ord(2 * Y, v)
    psi3 = _ord(3 * X**4 + 6 * A * X * X + 12 * B * X - A * A, v)
    # psi2 is infinite at 2-torsion; then psi3 is finite
    if psi3 >= 3 * psi2:
        return base - Fraction(psi2) / 3
    return base - Fraction(psi3) / 8


def local_height(curve: WeierstrassCurve, P: CurvePoint, v: Place) -> Fraction:
    """N_v * lambda_v(P), normalized for the divisor (O)."""
    if P.is_zero:
        raise ValueError("local height of O is undefined")
    return v.degree * _lambda(curve, P, v)


def height_places(curve: WeierstrassCurve, P: CurvePoint) -> list[Place]:
    X, Y = curve.short_coords(P)
    fs = [curve.disc, curve.short_A, curve.short_B, X, Y]
    return sorted(support([f for f in fs if not f.is_zero()]))


def canonical_height_local(curve: WeierstrassCurve, P: CurvePoint) -> Fraction:
    """Neron-Tate height for O(1) on the plane cubic, as a sum of local terms."""
    if P.is_zero:
        raise ValueError("P = O")
    total = sum((local_height(curve, P, v) for v in height_places(curve, P)), Fraction(0))
    return 3 * total


def component_index(curve: WeierstrassCurve, P: CurvePoint, v: Place) -> int:
    """Component of the Neron special fibre hit by P, folded into [0, m/2]."""
    red = curve.reduction_type(v)
    if red.kind != "Multiplicative":
        raise ValueError(f"{v} is not a place of multiplicative reduction")
    if P.is_zero:
        return 0
    model = curve.local_model(v)
    X, Y = curve.short_coords(P)
    pi = v.uniformizer()
    X = X / pi ** (2 * model.shift)
    Y = Y / pi ** (3 * model.shift)
    if _ord(X, v) < 0:
        return 0
    if not (_ord(3 * X * X + model.A, v) > 0 and _ord(2 * Y, v) > 0):
        return 0
    return int(min(_ord(Y, v), red.m // 2))


@dataclass(frozen=True)
class HindrySilvermanReport:
    average: Fraction
    bound: Fraction
    passed: bool
    pairs: int


def hindry_silverman_check(curve: WeierstrassCurve, points: Sequence[CurvePoint], v: Place) -> HindrySilvermanReport:
    """Average of N_v lambda_v(P_i - P_j) over ordered pairs against log+|j|_v / 12."""
    points = list(points)
    if len(points) < 2:
        raise ValueError("need at least two points")
    if len(set(points)) != len(points):
        raise ValueError("repeated points")
    red = curve.reduction_type(v)
    if red.kind == "Multiplicative":
        for P in points:
            if component_index(curve, P, v) != 0:
                raise ValueError(f"{P} does not reduce to the identity component at {v}")
    total = Fraction(0)
    pairs = 0
    for i, P in enumerate(points):
        for j, Q in enumerate(points):
            if i != j:
                total += local_height(curve, curve.sub(P, Q), v)
                pairs += 1
    average = total / pairs
    oj = _ord(curve.j, v)
    bound = Fraction(max(0, -v.degree * oj), 12) if oj != float("inf") else Fraction(0)
    return HindrySilvermanReport(average, bound, average >= bound, pairs)


# ---------------------------------------------------------------------------
# doubling on P^2


def _weierstrass_form(curve: WeierstrassCurve) -> MPoly:
    a1, a2, a3, a4, a6 = curve.ainvs
    return MPoly(
        3,
        {
            (0, 2, 1): 1,
            (1, 1, 1): a1,
            (0, 1, 2): a3,
            (3, 0, 0): -1,
            (2, 0, 1): -a2,
            (1, 0, 2): -a4,
            (0, 0, 3): -a6,
        },
    )


def doubling_forms(curve: WeierstrassCurve) -> list[MPoly]:
    """The classical doubling forms, before any correction."""
    a = curve.ainvs
    forms = []
    for table in DOUBLING:
        terms = {}
        for mono, coeffs in table.items():
            c = ZERO
            for k, exps in coeffs:
                term = as_rf(k)
                for ai, e in zip(a, exps):
                    if e:
                        term = term * ai**e
                c = c + term
            terms[mono] = c
        forms.append(MPoly(3, terms))
    return forms


_DUP_CACHE: dict = {}


def duplication_extension(curve: WeierstrassCurve, retries: int = 8) -> dynsys.HomogeneousMap:
    """Degree-4 endomorphism of P^2 restricting to [2] on the cubic.

    The classical forms are normal forms modulo the cubic, so none of them
    contains X^4 and [1:0:0] (a point off the curve) is a common zero.  A
    multiple of W * L, with W the cubic and L a linear form, is added to one
    form; this changes nothing on the curve.  Candidates are accepted once
    the Macaulay resultant is nonzero.
    """
    if curve in _DUP_CACHE:
        return _DUP_CACHE[curve]
    forms = doubling_forms(curve)
    W = _weierstrass_form(curve)
    rng = random.Random(0)
    certificate = (1, 0, 0)
    for attempt in range(retries + 1):
        F = dynsys.HomogeneousMap(forms)
        if any(not f(certificate).is_zero() for f in F.forms) and not F.resultant.is_zero():
            _DUP_CACHE[curve] = F
            return F
        lin = MPoly(3, {(1, 0, 0): rng.randint(1, 9), (0, 1, 0): rng.randint(1, 9), (0, 0, 1): rng.randint(1, 9)})
        forms = doubling_forms(curve)
        i = attempt % 3
        forms[i] = forms[i] + W * lin * rng.randint(1, 9)
    raise DuplicationSearchFailed(f"resultant still zero after {retries} corrections (common zero at [1:0:0] before correcting)")


def canonical_height_dyn(curve: WeierstrassCurve, P: CurvePoint, k: int = 12, **kw) -> dynsys.CanonicalHeight:
    F = duplication_extension(curve)
    return dynsys.canonical_height(F, P.projective(), k, **kw)


# ---------------------------------------------------------------------------
# Faltings height and the Arakelov inequality


@dataclass(frozen=True)
class FaltingsHeight:
    stable: Fraction
    semistable_sum: Fraction | None
    isotrivial: bool


def faltings_height(curve: WeierstrassCurve) -> FaltingsHeight:
    """(1/12) sum_v N_v max(0, -ord_v j); the Delta_min sum when semistable."""
    if curve.is_isotrivial:
        return FaltingsHeight(Fraction(0), None, True)
    stable = Fraction(0)
    for v in sorted(support([curve.j])):
        stable += Fraction(v.degree * max(0, -ord_at(curve.j, v)), 12)
    bad = curve.bad_reduction()
    semistable = None
    if all(r.kind == "Multiplicative" for r in bad):
        semistable = sum((Fraction(r.place.degree * r.ord_delta_min, 12) for r in bad), Fraction(0))
    return FaltingsHeight(stable, semistable, False)


@dataclass(frozen=True)
class ArakelovReport:
    height: Fraction
    bound: Fraction | str
    S: int
    holds: bool
    equality: bool


def arakelov_check(curve: WeierstrassCurve) -> ArakelovReport:
    """h_Fal <= (g/2)(2 g(B) - 2 + |S|) with g = 1, B = P^1.

    A bad place of degree N_v splits into N_v points over C, so |S| counts
    sum N_v.
    """
    from .constants import deligne_bound

    h = faltings_height(curve).stable
    S = sum(r.place.degree for r in curve.bad_reduction())
    bound = deligne_bound(1, 0, S)
    if isinstance(bound, str):
        return ArakelovReport(h, bound, S, True, False)
    return ArakelovReport(h, bound, S, h <= bound, h == bound)


# ---------------------------------------------------------------------------
# torsion


@dataclass
class TorsionResult:
    points: list[tuple[CurvePoint, int]]
    structure: tuple[int, ...]
    max_order: int
    complete: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.points)


def _prime_powers(bound: int) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for p in range(2, bound + 1):
        if all(p % q for q in range(2, p)):
            q = p
            while q <= bound:
                out.setdefault(p, []).append(q)
                q *= p
    return out


def _division_polys(b: Sequence, beta, one, n_max: int) -> list:
    """f_n = psi_n (n odd) or psi_n / psi_2 (n even) as polynomials in x."""
    b2, b4, b6, b8 = b
    x = one["x"]
    f = [one[0], one[1], one[1]]
    f.append(3 * x**4 + b2 * x**3 + 3 * b4 * x**2 + 3 * b6 * x + b8)
    f.append(2 * x**6 + b2 * x**5 + 5 * b4 * x**4 + 10 * b6 * x**3 + 10 * b8 * x**2 + (b2 * b8 - b4 * b6) * x + (b4 * b8 - b6 * b6))
    beta2 = beta * beta
    for n in range(5, n_max + 1):
        m = n // 2
        if n % 2:
            if m % 2 == 0:
                f.append(beta2 * f[m + 2] * f[m] ** 3 - f[m - 1] * f[m + 1] ** 3)
            else:
                f.append(f[m + 2] * f[m] ** 3 - beta2 * f[m - 1] * f[m + 1] ** 3)
        else:
            f.append(f[m] * (f[m + 2] * f[m - 1] ** 2 - f[m - 2] * f[m + 1] ** 2))
    return f


def _integral_model(curve: WeierstrassCurve):
    """(u, curve') with curve' = curve scaled by u having a_i in Z[t]."""
    den = fmpq_poly([1])
    for a in curve.ainvs:
        den = den * (a.den // den.gcd(a.den))
    u = RationalFunction(den)
    scaled = [a * u**w for a, w in zip(curve.ainvs, (1, 2, 3, 4, 6))]
    c = 1
    for a in scaled:
        c = lcm(c, int(a.num.denom()))
    u = u * c
    return u, WeierstrassCurve(*(a * u**w for a, w in zip(curve.ainvs, (1, 2, 3, 4, 6))))


def _zpoly(f: RationalFunction) -> fmpz_poly:
    return fmpz_poly([int(c) for c in f.num.coeffs()])


def _has_rational_root(p: fmpz_poly) -> bool:
    if p.is_zero():
        return True
    return any(g.degree() == 1 for g, _ in p.factor()[1])


def _specializations(curve: WeierstrassCurve, count: int = 2) -> list[int]:
    out = []
    t0 = 2
    while len(out) < count:
        if curve.disc.num(t0) != 0:
            out.append(t0)
        t0 = -t0 if t0 > 0 else -t0 + 1
    return out


def _roots_in_x(poly, ctx) -> list[RationalFunction]:
    """Roots x(t) in Q[t] of a polynomial in Z[x, t] with constant x-leading term."""
    roots = []
    _, factors = poly.factor()
    for g, _ in factors:
        degs = g.degrees()
        if degs[0] != 1:
            continue
        # g = c x + h(t)
        c = None
        h = {}
        for (ex, et), coef in g.to_dict().items():
            if ex == 1:
                c = int(coef)
            else:
                h[et] = int(coef)
        top = max(h, default=0)
        hp = fmpq_poly([h.get(i, 0) for i in range(top + 1)])
        roots.append(RationalFunction(-hp / c))
    return roots


def _sqrt_poly(f: RationalFunction) -> RationalFunction | None:
    if f.is_zero():
        return ZERO
    if not f.is_polynomial():
        return None
    p = f.num
    den = int(p.denom())
    z = fmpz_poly([int(c) for c in (p * den * den).coeffs()])
    try:
        r = z.sqrt()
    except DomainError:
        return None
    if r is None:
        return None
    return RationalFunction(fmpq_poly(list(r.coeffs())) / den)


def torsion_points(curve: WeierstrassCurve, max_order: int = 12) -> TorsionResult:
    """K-rational torsion points whose order has prime-power parts <= max_order.

    The x-coordinates of torsion points on a model with a_i in Z[t] lie in
    Q[t] (they are integral over Q[t]).  For each prime l the chain
    psi_2^2, f_4, f_8, ... (or f_l, f_{l^2}, ...) is tested first by a
    necessary condition, a rational root after specializing t, and then
    by exact bivariate factorization.
    """
    u, E = _integral_model(curve)
    ctx = fmpz_mpoly_ctx.get(("x", "t"), "lex")
    X, T = ctx.gens()

    def lift(f: RationalFunction):
        out = ctx.from_dict({})
        for i, c in enumerate(f.num.coeffs()):
            if c != 0:
                out = out + int(c) * T**i
        return out

    b = [E.b2, E.b4, E.b6, E.b8]
    beta_rf = lambda x: 4 * x**3 + E.b2 * x * x + 2 * E.b4 * x + E.b6  # noqa: E731
    powers = _prime_powers(max_order)
    n_max = max([q for qs in powers.values() for q in qs if q > 2], default=4)
    n_max = max(n_max, 4)
    specs = _specializations(E)
    special_polys = {}
    for t0 in specs:
        one = {0: fmpz_poly([0]), 1: fmpz_poly([1]), "x": fmpz_poly([0, 1])}
        bt = [int(_zpoly(bi)(t0)) for bi in b]
        beta_t = fmpz_poly([bt[2], 2 * bt[1], bt[0], 4])
        special_polys[t0] = (beta_t, _division_polys(bt, beta_t, one, n_max))
    general = None

    primary: dict[int, set[CurvePoint]] = {}
    for ell, qs in powers.items():
        found = {O}
        for q in qs:
            if not all(_has_rational_root(beta_t if q == 2 else f[q]) for beta_t, f in special_polys.values()):
                break
            if general is None:
                one = {0: ctx.from_dict({}), 1: ctx.from_dict({(0, 0): 1}), "x": X}
                bl = [lift(bi) for bi in b]
                beta = 4 * X**3 + bl[0] * X**2 + 2 * bl[1] * X + bl[2]
                general = (beta, _division_polys(bl, beta, one, n_max))
            poly = general[0] if q == 2 else general[1][q]
            new = set()
            for x in _roots_in_x(poly, ctx):
                s = _sqrt_poly(beta_rf(x))
                if s is None:
                    continue
                for sign in (1, -1):
                    y = (sign * s - E.a1 * x - E.a3) / 2
                    P = CurvePoint(x, y)
                    assert E.contains(P)
                    if E.order(P, q) is not None:
                        new.add(P)
            if not new - found:
                break
            found |= new
        primary[ell] = found

    group = {O}
    for pts in primary.values():
        group = {E.add(P, Q) for P in group for Q in pts}
    bound = 1
    for qs in powers.values():
        bound *= qs[-1]
    result = []
    for P in group:
        n = E.order(P, bound)
        # back to the original model
        Q = O if P.is_zero else CurvePoint(P.x / u**2, P.y / u**3)
        result.append((Q, n))
    result.sort(key=lambda pn: (pn[1], str(pn[0])))
    exponent = max(n for _, n in result)
    structure = (exponent,) if len(result) == exponent else (len(result) // exponent, exponent)
    if structure == (1,):
        structure = ()
    return TorsionResult(result, structure, max_order)
