"""Endomorphisms of P^N over Q(t): resultants, escape rates, canonical heights.

Escape rates are computed place by place.  The orbit of a unit-normalized
lift is followed in the truncated completion O_v/(p^c): if Q has max
coordinate a unit, then ord F(Q) is read off exactly and pi^(-e) F(Q) is
again unit-normalized, with c dropping by e.  This gives

    d^-k log||F^k(P)||_v = log||P||_v - N_v * sum_{j<k} a_j d^-(j+1)

with a_j the successive valuations, so only those integers are needed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import count
from typing import Sequence

from flint import fmpq, fmpq_poly, fmpz_mat, fmpz_poly

from .forms import MPoly, monomials
from .funcfield import ONE, Place, RationalFunction, as_rf, log_abs, ord_at, support
from .linalg import det as det_K
from .local import RESIDUE_PRIMES, PrecisionExhausted, ResidueRing, UnluckyPrime
from .projheights import ProjPoint, boundary_height_ratd, log_norm, min_ord, weil_height

__all__ = [
    "HomogeneousMap",
    "EscapeRateResult",
    "CanonicalHeight",
    "BudgetExceeded",
    "DegenerateMap",
    "ResidueMismatch",
    "macaulay_resultant",
    "sylvester_resultant",
    "r_of_F",
    "escape_rate",
    "escape_rate_normalized",
    "height_places",
    "canonical_height",
    "julia_radius_bound",
    "good_reduction",
    "bad_places",
    "default_budget",
]

DEFAULT_BUDGET = 10**7


def default_budget() -> int:
    return int(os.environ.get("FFHT_BUDGET", DEFAULT_BUDGET))


class BudgetExceeded(RuntimeError):
    def __init__(self, used: int, budget: int):
        super().__init__(f"budget exceeded ({used} > {budget} digits), increase budget or reduce k")
        self.used = used
        self.budget = budget


class DegenerateMap(ValueError):
    """The forms have a common zero: zero resultant."""


class ResidueMismatch(ArithmeticError):
    """Residue computations modulo different primes disagreed."""


class HomogeneousMap:
    """A lift F = (F_0, ..., F_N) of an endomorphism of P^N over Q(t).

    By default the forms are scaled so that their first nonzero
    coefficient is exactly 1; pass ``normalize=False`` to keep a given lift.
    """

    def __init__(self, forms: Sequence[MPoly], *, normalize: bool = True):
        forms = tuple(forms)
        if len(forms) < 2:
            raise ValueError("need at least two forms")
        nvars = len(forms)
        degs = {f.degree() for f in forms if not f.is_zero()}
        if any(f.nvars != nvars for f in forms):
            raise ValueError("forms must be in N+1 variables")
        if len(degs) != 1 or not all(f.is_homogeneous() for f in forms):
            raise ValueError("forms must be homogeneous of a common degree")
        self.d = degs.pop()
        if self.d < 1:
            raise ValueError("degree must be positive")
        if normalize:
            lead = next(f for f in forms if not f.is_zero())
            c = next(iter(lead.terms.values()))
            if c != ONE:
                inv = c.inverse()
                forms = tuple(f * inv for f in forms)
        self.forms = forms
        self.N = nvars - 1
        self.normalized = normalize

    @classmethod
    def from_strings(cls, forms: Sequence[dict], nvars: int | None = None, **kw) -> "HomogeneousMap":
        """Build from ``{(exponents): "coeff"}`` dictionaries."""
        nvars = nvars or len(forms)
        return cls([MPoly(nvars, {tuple(e): as_rf(c) for e, c in f.items()}) for f in forms], **kw)

    def coefficients(self) -> list[RationalFunction]:
        return [c for f in self.forms for c in f.coefficients()]

    @cached_property
    def resultant(self) -> RationalFunction:
        return macaulay_resultant(self)

    def scaled(self, u) -> "HomogeneousMap":
        """The lift u*F; Res(uF) = u^((N+1) d^N) Res(F), so the cache carries over."""
        u = as_rf(u)
        out = HomogeneousMap([f * u for f in self.forms], normalize=False)
        if "resultant" in self.__dict__:
            out.__dict__["resultant"] = u ** ((self.N + 1) * self.d**self.N) * self.resultant
        return out

    def __call__(self, point: Sequence) -> list[RationalFunction]:
        return [f(point) for f in self.forms]

    def image(self, P: ProjPoint) -> ProjPoint:
        return ProjPoint(self(P.canonical()))

    def compose(self, other: "HomogeneousMap") -> "HomogeneousMap":
        """self o other."""
        return HomogeneousMap([f.compose(other.forms) for f in self.forms], normalize=False)

    def iterate(self, k: int, budget: int | None = None) -> "HomogeneousMap":
        """F^(k) by polynomial composition, guarded by a size budget."""
        budget = budget or default_budget()
        result = self
        for _ in range(k - 1):
            result = self.compose(result)
            used = sum(f.digits() for f in result.forms)
            if used > budget:
                raise BudgetExceeded(used, budget)
        return result

    def __eq__(self, other):
        return isinstance(other, HomogeneousMap) and self.forms == other.forms

    def __hash__(self):
        return hash(self.forms)

    def __str__(self):
        return "(" + ", ".join(str(f) for f in self.forms) + ")"

    def to_json(self) -> dict:
        return {"nvars": self.N + 1, "forms": [f.to_records() for f in self.forms]}

    @classmethod
    def from_json(cls, data: dict, **kw) -> "HomogeneousMap":
        nvars = int(data.get("nvars", len(data["forms"])))
        return cls([MPoly.from_records(nvars, recs) for recs in data["forms"]], **kw)


# ---------------------------------------------------------------------------
# resultants


def sylvester_resultant(f: MPoly, g: MPoly) -> RationalFunction:
    """Resultant of two binary forms of degree d, normalized Res(X^d, Y^d) = 1."""
    d = f.degree()
    if g.degree() != d:
        raise ValueError("binary forms must share their degree")
    fc = [f.coefficient((d - i, i)) for i in range(d + 1)]
    gc = [g.coefficient((d - i, i)) for i in range(d + 1)]
    size = 2 * d
    zero = as_rf(0)
    rows = []
    for shift in range(d):
        rows.append([zero] * shift + fc + [zero] * (d - 1 - shift))
    for shift in range(d):
        rows.append([zero] * shift + gc + [zero] * (d - 1 - shift))
    assert all(len(r) == size for r in rows)
    return det_K(rows)


class _MacaulayLayout:
    """Row/column structure of the Macaulay matrix in degree (N+1)(d-1)+1."""

    def __init__(self, N: int, d: int):
        self.N, self.d = N, d
        D = (N + 1) * (d - 1) + 1
        self.mons = monomials(N + 1, D)
        self.index = {m: i for i, m in enumerate(self.mons)}
        self.row_form = []
        self.row_shift = []
        extraneous = []
        for m in self.mons:
            big = [i for i in range(N + 1) if m[i] >= d]
            i = big[0]
            self.row_form.append(i)
            self.row_shift.append(tuple(a - (d if j == i else 0) for j, a in enumerate(m)))
            if len(big) > 1:
                extraneous.append(self.index[m])
        self.extraneous = extraneous

    def matrix(self, coeffs: Sequence[dict]):
        """Entries from per-form ``{monomial: value}`` maps."""
        size = len(self.mons)
        rows = [[0] * size for _ in range(size)]
        for r in range(size):
            shift = self.row_shift[r]
            for e, c in coeffs[self.row_form[r]].items():
                col = self.index[tuple(a + b for a, b in zip(shift, e))]
                rows[r][col] = c
        return rows


def _newton_interpolate(xs: Sequence[int], ys: Sequence[fmpq]) -> fmpq_poly:
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = fmpq_poly([coef[-1]])
    for i in range(n - 2, -1, -1):
        poly = poly * fmpq_poly([-xs[i], 1]) + coef[i]
    return poly


def _integral_forms(F: HomogeneousMap):
    """Scale each form into Z[t][x]; return (coefficient maps, scale factors)."""
    out = []
    scales = []
    for f in F.forms:
        common = fmpq_poly([1])
        for c in f.coefficients():
            common = common * (c.den // common.gcd(c.den))
        polys = {e: c.num * (common // c.den) for e, c in f.terms.items()}
        den = 1
        for p in polys.values():
            den = den * int(p.denom()) // _gcd(den, int(p.denom()))
        polys = {e: fmpz_poly([int(x) for x in (p * den).coeffs()]) for e, p in polys.items()}
        out.append(polys)
        scales.append(RationalFunction(common * den))
    return out, scales


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def _det_ratio_at(layout: _MacaulayLayout, coeffs: Sequence[dict], t0: int):
    vals = [{e: p(t0) for e, p in c.items()} for c in coeffs]
    full = layout.matrix(vals)
    M = fmpz_mat(full)
    ex = layout.extraneous
    if ex:
        Mp = fmpz_mat([[full[r][c] for c in ex] for r in ex])
        den = Mp.det()
    else:
        den = 1
    if den == 0:
        # generalized characteristic polynomial: perturb by coordinate powers
        cp = (-M).charpoly()
        cpp = (-Mp).charpoly()
        quo = cp // cpp
        return fmpq(quo.coeffs()[0] if quo.coeffs() else 0)
    return fmpq(M.det()) / den


def macaulay_resultant(F: HomogeneousMap) -> RationalFunction:
    """Macaulay resultant of (F_0, ..., F_N) as an element of Q(t).

    N = 1 uses the Sylvester determinant.  Otherwise the forms are scaled
    into Z[t][x], the determinant quotient det(M)/det(M') is evaluated
    exactly at integer values of t, and the result is interpolated using
    the degree bound d^N * sum_i deg_t(F_i).
    """
    if F.N == 1:
        return sylvester_resultant(*F.forms)
    layout = _MacaulayLayout(F.N, F.d)
    coeffs, scales = _integral_forms(F)
    dN = F.d ** F.N
    bound = dN * sum(max((p.degree() for p in c.values()), default=0) for c in coeffs)
    xs, ys = [], []
    for k in count():
        t0 = (k + 1) // 2 * (1 if k % 2 else -1)
        xs.append(t0)
        ys.append(_det_ratio_at(layout, coeffs, t0))
        if len(xs) == bound + 2:
            break
    poly = _newton_interpolate(xs[:-1], ys[:-1])
    if poly(xs[-1]) != ys[-1]:
        raise ArithmeticError("resultant interpolation failed its check node")
    res = RationalFunction(poly)
    for s in scales:
        res = res / s**dN
    return res


# ---------------------------------------------------------------------------
# local invariants


def r_of_F(F: HomogeneousMap, v: Place) -> Fraction:
    """r(F) = log|Res F|_v^{-1} / (d^N (N+1)(d-1))."""
    res = F.resultant
    if res.is_zero():
        raise DegenerateMap("degenerate map: zero resultant")
    return -log_abs(res, v) / (F.d**F.N * (F.N + 1) * (F.d - 1))


def good_reduction(F: HomogeneousMap, v: Place) -> bool:
    res = F.resultant
    if res.is_zero():
        raise DegenerateMap("degenerate map: zero resultant")
    return min_ord(F.coefficients(), v) == 0 and ord_at(res, v) == 0


def bad_places(F: HomogeneousMap) -> list[Place]:
    """Places where the lift F fails to have good reduction, sorted."""
    res = F.resultant
    if res.is_zero():
        raise DegenerateMap("degenerate map: zero resultant")
    cands = support([res] + F.coefficients())
    return sorted(v for v in cands if not good_reduction(F, v))


def julia_radius_bound(F: HomogeneousMap, v: Place) -> Fraction:
    """(lambda_v(f) + log||F||_v) / (d - 1): log-radius of the filled Julia set."""
    if F.resultant.is_zero():
        raise DegenerateMap("degenerate map: zero resultant")
    return (boundary_height_ratd(F, v) + log_norm(F, v)) / (F.d - 1)


@dataclass(frozen=True)
class EscapeRateResult:
    approx: Fraction
    error_bound: Fraction
    iterations: int

    @property
    def lo(self) -> Fraction:
        return self.approx - self.error_bound

    @property
    def hi(self) -> Fraction:
        return self.approx + self.error_bound

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def within(self, other: "EscapeRateResult") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi


@dataclass(frozen=True)
class CanonicalHeight:
    approx: Fraction
    error_bound: Fraction

    @property
    def lo(self) -> Fraction:
        return self.approx - self.error_bound

    @property
    def hi(self) -> Fraction:
        return self.approx + self.error_bound

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __iter__(self):
        yield self.approx
        yield self.error_bound


def _escape_error(F: HomogeneousMap, v: Place, k: int) -> Fraction:
    L = log_norm(F, v)
    if L < 0:
        # the bound needs log||F||_v >= 0; use the v-normalized lift (same orbit data)
        lam = -log_abs(F.resultant, v) - (F.N + 1) * F.d**F.N * L
        L = Fraction(0)
    else:
        lam = boundary_height_ratd(F, v)
    return (lam + max(L, Fraction(0))) / ((F.d - 1) * Fraction(F.d) ** k)


def _orbit_valuations(F, v, coords, m, e_F, k, modulus, budget):
    ring = ResidueRing(v, modulus)
    ord_res = ord_at(F.resultant, v) - (F.N + 1) * F.d**F.N * e_F
    cap = k * ord_res + 1
    prec = min(cap, max(8, 2 * k + 2))
    while True:
        try:
            return _run_orbit(ring, F, coords, m, e_F, k, prec, budget)
        except PrecisionExhausted:
            if prec >= cap:
                raise
            prec = min(cap, 2 * prec)


def _run_orbit(ring, F, coords, m, e_F, k, prec, budget):
    forms = [[(e, ring.embed(c, prec, shift=e_F)) for e, c in f.terms.items()] for f in F.forms]
    point = [ring.embed(x, prec, shift=m) for x in coords]
    c = prec
    seq = []
    for _ in range(k):
        values = ring.evaluate_forms(forms, point, c, F.d)
        e = min(ring.valuation(x, c) for x in values)
        if e >= c:
            raise PrecisionExhausted
        point = [ring.shift_down(x, e) for x in values]
        c -= e
        seq.append(e)
        if ring.modulus is None:
            used = sum(_poly_digits(x) for x in point)
        else:
            # truncated residues: c coefficients per residue-field degree, one word each
            used = len(point) * c * ring.place.degree * _WORD_DIGITS
        if used > budget:
            raise BudgetExceeded(used, budget)
    return seq


_WORD_DIGITS = 19


def _poly_digits(p: fmpq_poly) -> int:
    if p.is_zero():
        return 1
    return (p.numer().height_bits() + int(p.denom()).bit_length()) * p.length() * 3 // 10 + 1


def orbit_valuations(F: HomogeneousMap, v: Place, coords, k: int, *, residue: str = "modular", budget=None) -> list[int]:
    """Valuations e'_j of F_int(Q_j) along the normalized orbit of ``coords``."""
    budget = budget or default_budget()
    coords = [as_rf(x) for x in coords]
    m = min_ord(coords, v)
    e_F = min_ord(F.coefficients(), v)
    if residue == "exact":
        return _orbit_valuations(F, v, coords, m, e_F, k, None, budget)
    results = []
    for ell in RESIDUE_PRIMES:
        try:
            results.append(_orbit_valuations(F, v, coords, m, e_F, k, ell, budget))
        except UnluckyPrime:
            continue
        if len(results) == 2:
            if results[0] == results[1]:
                return results[0]
        if len(results) == 3:
            for r in results:
                if results.count(r) >= 2:
                    return r
    raise ResidueMismatch(f"residue computations disagree at {v}")


def escape_rate(F: HomogeneousMap, P, v: Place, k: int, *, residue: str = "modular", budget=None) -> EscapeRateResult:
    """Certified approximation of H_F(P) = lim d^-n log||F^n(P)||_v.

    ``P`` is a lift: a sequence of elements of K (or a ProjPoint, whose
    canonical representative is used).
    """
    coords = list(P.canonical()) if isinstance(P, ProjPoint) else [as_rf(x) for x in P]
    if all(c.is_zero() for c in coords):
        raise ValueError("zero point")
    if k < 0:
        raise ValueError("k must be nonnegative")
    m = min_ord(coords, v)
    Nv = v.degree
    log_p = Fraction(-Nv * m)
    if good_reduction(F, v):
        return EscapeRateResult(log_p, Fraction(0), k)
    e_F = min_ord(F.coefficients(), v)
    seq = orbit_valuations(F, v, coords, k, residue=residue, budget=budget)
    d = F.d
    tail = sum((Fraction(e_F + e, d ** (j + 1)) for j, e in enumerate(seq)), Fraction(0))
    approx = log_p - Nv * tail
    return EscapeRateResult(approx, _escape_error(F, v, k), k)


def escape_rate_normalized(F: HomogeneousMap, P, v: Place, k: int, *, residue: str = "modular", budget=None) -> EscapeRateResult:
    """Certified H_F(P) at v, iterating the v-normalized lift F_v = pi^(-e) F.

    H_F = H_{F_v} - N_v e / (d - 1) exactly, and the error bound for F_v
    (whose log-norm is 0) is much smaller than the one for F.
    """
    e_F = min_ord(F.coefficients(), v)
    shift = Fraction(v.degree * e_F, F.d - 1)
    Fv = F.scaled(v.uniformizer() ** (-e_F)) if e_F else F
    r = escape_rate(Fv, P, v, k, residue=residue, budget=budget)
    return EscapeRateResult(r.approx - shift, r.error_bound, r.iterations)


def height_places(F: HomogeneousMap) -> list[Place]:
    """Places where the v-normalized lift of F can have bad reduction."""
    if F.resultant.is_zero():
        raise DegenerateMap("degenerate map: zero resultant")
    return sorted(support([F.resultant] + F.coefficients()))


def canonical_height(F: HomogeneousMap, P: ProjPoint, k: int, *, residue: str = "modular", budget=None) -> CanonicalHeight:
    """h_f(P) = sum_v H_{F,v}(P~) with a certified error bound.

    Outside the places returned by ``height_places`` the normalized lift has
    good reduction and H_{F,v}(P~) = log||P~||_v, so the sum is h(P) plus
    finitely many corrections.
    """
    if not isinstance(P, ProjPoint):
        P = ProjPoint(P)
    lift = P.canonical()
    total = weil_height(P)
    err = Fraction(0)
    for v in height_places(F):
        r = escape_rate_normalized(F, lift, v, k, residue=residue, budget=budget)
        total += r.approx + v.degree * min_ord(lift, v)
        err += r.error_bound
    return CanonicalHeight(total, err)
