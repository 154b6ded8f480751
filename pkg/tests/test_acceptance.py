"""Acceptance criteria 1-10.

Run under pytest (one test per criterion, with a [PASS]/[FAIL] summary line
each at the end of the session) or standalone:

    python3 tests/test_acceptance.py
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest
from flint import fmpq_poly

sys.path.insert(0, str(Path(__file__).parent))

from curves import curve_with_points, kubert, legendre, random_curve, random_family_curve  # noqa: E402
from ffht.constants import HilbertPolynomial, deligne_bound, gotzmann_number, regularity_bound, zarhin_matrix  # noqa: E402
from ffht.dynsys import HomogeneousMap  # noqa: E402
from ffht.dynsys import height_places as map_places  # noqa: E402
from ffht.elliptic import (  # noqa: E402
    O,
    arakelov_check,
    canonical_height_dyn,
    canonical_height_local,
    component_index,
    duplication_extension,
    faltings_height,
    hindry_silverman_check,
    torsion_points,
)
from ffht.funcfield import INFINITY, Place, RationalFunction, ord_at, parse, product_formula_check  # noqa: E402
from ffht.goodbasis import PlaneCubic, ProjectiveSpace, extract_basis, spanning_family  # noqa: E402
from ffht.green import global_green_identity, green_value  # noqa: E402
from ffht.linalg import det, rank  # noqa: E402
from ffht.projheights import ProjPoint, unit_lift  # noqa: E402

REPORT: list[str] = []


class Check:
    """Collects sub-checks for one criterion and records a summary line."""

    def __init__(self, number: int, title: str, limit: float):
        self.number, self.title, self.limit = number, title, limit
        self.failures: list[str] = []
        self.notes: list[str] = []
        self.start = time.perf_counter()

    def require(self, ok: bool, what: str) -> None:
        if not ok:
            self.failures.append(what)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def finish(self) -> bool:
        elapsed = time.perf_counter() - self.start
        self.require(elapsed < self.limit, f"runtime {elapsed:.1f}s exceeds {self.limit:.0f}s")
        ok = not self.failures
        detail = "; ".join(self.failures) if self.failures else "; ".join(self.notes)
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {self.number}: {self.title} ({elapsed:.1f}s) {detail}"
        REPORT.append(line)
        print(line)
        return ok


# shared sample for criteria 4, 5 and 9 --------------------------------------------

_SAMPLE: list = []


def height_sample(count: int = 20):
    if not _SAMPLE:
        rng = random.Random(20241016)
        _SAMPLE.extend(curve_with_points(rng) for _ in range(count))
    return _SAMPLE[:count]


# criteria -----------------------------------------------------------------------


def criterion_1() -> bool:
    c = Check(1, "product formula on 200 random f in Q(t)^x", 5)
    rng = random.Random(1)
    for _ in range(200):
        num = fmpq_poly([rng.randint(1, 1000)])
        den = fmpq_poly([rng.randint(1, 1000)])
        for _ in range(rng.randint(0, 3)):
            num *= fmpq_poly([rng.randint(-1000, 1000) for _ in range(rng.randint(2, 4))])
        for _ in range(rng.randint(0, 3)):
            den *= fmpq_poly([rng.randint(-1000, 1000) for _ in range(rng.randint(2, 4))])
        if num.is_zero() or den.is_zero():
            continue
        f = RationalFunction(num, den)
        s = product_formula_check(f)
        c.require(s == 0, f"sum {s} != 0 for {f}")
    c.note("all sums exactly 0")
    return c.finish()


def criterion_2() -> bool:
    c = Check(2, "Legendre curve package", 1)
    E = legendre()
    c.require(E.disc == parse("16*t^2*(t-1)^2"), f"disc {E.disc}")
    c.require(E.j == parse("256*(t^2-t+1)^3/(t^2*(t-1)^2)"), f"j {E.j}")
    bad = E.bad_reduction()
    places = {r.place for r in bad}
    c.require(places == {Place.finite(parse("t")), Place.finite(parse("t-1")), INFINITY}, f"bad places {places}")
    for r in bad:
        c.require(r.label == "Multiplicative(2)", f"{r.place}: {r.label} (ord Delta_min {r.ord_delta_min}, ord j {r.ord_j})")
    h = faltings_height(E).stable
    c.require(h == Fraction(1, 2), f"stable Faltings height {h}")
    a = arakelov_check(E)
    c.require(a.holds and a.equality and a.bound == Fraction(1, 2), f"Arakelov {a}")
    c.note("disc, j, bad places, h = 1/2, 1/2 <= 1/2")
    return c.finish()


def criterion_3() -> bool:
    c = Check(3, "torsion bounds", 120)
    res = torsion_points(legendre())
    c.require(res.size == 4 and res.structure == (2, 2), f"Legendre torsion {res.structure}")
    K = kubert("t", "t")
    c.require(K.order(K.point(0, 0), 12) == 5, "Kubert (0,0) order")
    rng = random.Random(3)
    worst = 0
    nontrivial = 0
    for i in range(100):
        E = random_family_curve(rng)[0] if i % 2 else random_curve(rng)
        c.require(not E.is_isotrivial, "isotrivial sample")
        T = torsion_points(E)
        top = max(n for _, n in T.points)
        worst = max(worst, top)
        nontrivial += T.size > 1
        c.require(top <= 12 and T.complete, f"torsion order {top} (complete={T.complete})")
    c.note(f"max order over 100 curves {worst}, {nontrivial} with nontrivial torsion")
    return c.finish()


def criterion_4() -> bool:
    c = Check(4, "dual-oracle canonical height on 20 pairs at k = 12", 300)
    widest = Fraction(0)
    for E, P, _ in height_sample():
        loc = canonical_height_local(E, P)
        dyn = canonical_height_dyn(E, P, 12)
        width = dyn.hi - dyn.lo
        widest = max(widest, width)
        c.require(dyn.contains(loc), f"local {loc} outside [{float(dyn.lo)}, {float(dyn.hi)}]")
        c.require(width <= Fraction(1, 1000), f"width {float(width)}")
    c.note(f"widest interval {float(widest):.2e}")
    return c.finish()


def criterion_5() -> bool:
    c = Check(5, "functional equation and quadraticity", 300)
    for E, P, Q in height_sample():
        hP, hQ = canonical_height_dyn(E, P, 12), canonical_height_dyn(E, Q, 12)
        h2P = canonical_height_dyn(E, E.mul(2, P), 12)
        hs, hd = canonical_height_dyn(E, E.add(P, Q), 12), canonical_height_dyn(E, E.sub(P, Q), 12)
        c.require(abs(h2P.approx - 4 * hP.approx) <= h2P.error_bound + 4 * hP.error_bound, "h(2P) != 4 h(P)")
        resid = hs.approx + hd.approx - 2 * hP.approx - 2 * hQ.approx
        tol = hs.error_bound + hd.error_bound + 2 * hP.error_bound + 2 * hQ.error_bound
        c.require(abs(resid) <= tol, f"quadraticity residual {float(resid)} > {float(tol)}")
    c.note("20 curves")
    return c.finish()


def _tuples_with_nonzero_det(E, P, Q, basis, count):
    """Points aP + bQ, greedily kept while the evaluation matrix stays nonsingular."""
    cands = []
    for a in range(-3, 4):
        for b in range(-3, 4):
            R = E.add(E.mul(a, P), E.mul(b, Q))
            if not R.is_zero and R not in cands:
                cands.append(R)
    cands.sort(key=lambda R: (max(R.x.num.degree(), R.x.den.degree()), str(R)))
    chosen = []
    for R in cands:
        trial = chosen + [R]
        lifts = [S.projective().canonical() for S in trial]
        rows = basis.evaluation_matrix(lifts)
        if rank(rows, basis.size) == len(trial):
            chosen = trial
            if len(chosen) == count:
                return chosen
    raise AssertionError("no tuple with nonzero determinant")


def criterion_6() -> bool:
    c = Check(6, "Green identities on a plane cubic, n <= 4", 120)
    E, P, Q = curve_with_points(random.Random(6))
    F = duplication_extension(E)
    for n in range(1, 5):
        B = extract_basis(spanning_family(F, n), PlaneCubic(E))
        pts = _tuples_with_nonzero_det(E, P, Q, B, B.size)
        gi = global_green_identity(B, F, [R.projective() for R in pts], k=12)
        c.require(gi.applicable, f"n={n}: determinant vanishes")
        if not gi.applicable:
            continue
        c.require(gi.det_place_sum == 0, f"n={n}: sum log|det| = {gi.det_place_sum}")
        c.require(gi.rF_sum == 0, f"n={n}: sum r_v(F) = {gi.rF_sum}")
        c.require(gi.overlap, f"n={n}: lhs [{float(gi.lhs[0])}, {float(gi.lhs[1])}] vs rhs [{float(gi.rhs[0])}, {float(gi.rhs[1])}]")
    c.note("exact sums 0 and overlapping intervals for n = 1..4")
    return c.finish()


def criterion_7() -> bool:
    c = Check(7, "good-reduction zero", 60)
    E, P, Q = curve_with_points(random.Random(7))
    F = duplication_extension(E)
    bad = set(map_places(F))
    tested = 0
    for n in (1, 2, 3):
        B = extract_basis(spanning_family(F, n), PlaneCubic(E))
        pts = [R.projective() for R in _tuples_with_nonzero_det(E, P, Q, B, B.size)]
        for k in range(2, 40):
            v = Place.finite(parse(f"t-{k}"))
            if v in bad:
                continue
            D = det(B.evaluation_matrix([unit_lift(R.canonical(), v) for R in pts]))
            if D.is_zero() or ord_at(D, v) != 0:
                continue
            g = green_value(B, F, pts, v, 12)
            c.require(g.value == 0 and g.error == 0, f"n={n}, v={v}: g = {g.value}")
            tested += 1
    # the projective-line example
    sq = HomogeneousMap.from_strings([{(2, 0): "1"}, {(0, 2): "1"}])
    Bp = extract_basis(spanning_family(sq, 1), ProjectiveSpace(1))
    g = green_value(Bp, sq, [ProjPoint([0, 1]), ProjPoint([1, 1])], Place.finite(parse("t")))
    c.require(g.value == 0, "P^1 Vandermonde example")
    c.require(tested >= 10, f"only {tested} places tested")
    c.note(f"g_n = 0 exactly at {tested} good places")
    return c.finish()


def criterion_8() -> bool:
    c = Check(8, "Hindry-Silverman positivity on the Legendre curve", 60)
    E = legendre()
    group = [P for P, _ in torsion_points(E).points]  # all of E(K): the Legendre curve has rank 0
    mult = [r for r in E.bad_reduction() if r.kind == "Multiplicative"]
    for r in mult:
        idx0 = [P for P in group if component_index(E, P, r.place) == 0]
        c.require(len(idx0) >= 2, f"{r.place}: fewer than two index-0 points")
        if len(idx0) < 2:
            continue
        rep = hindry_silverman_check(E, idx0, r.place)
        c.require(rep.passed, f"{r.place}: average {rep.average} < bound {rep.bound}")
        c.note(f"{r.place}: {rep.average} >= {rep.bound}")
    c.require(len(mult) == 2, f"{len(mult)} multiplicative places")
    return c.finish()


def criterion_9() -> bool:
    c = Check(9, "duplication extension on 10 curves", 300)
    rng = random.Random(9)
    for E, P, Q in height_sample()[:10]:
        F = duplication_extension(E)
        c.require(F.d == 4 and not F.resultant.is_zero(), "zero resultant")
        c.require(F.image(O.projective()) == O.projective(), "F(O) != O")
        for _ in range(10):
            a, b = rng.randint(-3, 3), rng.randint(-3, 3)
            R = E.add(E.mul(a, P), E.mul(b, Q))
            c.require(F.image(R.projective()) == E.mul(2, R).projective(), f"F({a}P+{b}Q) != 2R")
    c.note("Res != 0 and F = [2] on 100 points")
    return c.finish()


def criterion_10() -> bool:
    c = Check(10, "explicit constants", 10)
    rng = random.Random(10)
    for _ in range(100):
        a = [rng.randint(-30, 30) for _ in range(4)]
        m = zarhin_matrix(*a)
        s = sum(x * x for x in a)
        c.require(m.gram() == [[s * (i == j) for j in range(4)] for i in range(4)], f"I I^t != s Id for {a}")
    c.require(gotzmann_number(HilbertPolynomial.parse("1")) == 1, "gotzmann(1)")
    c.require(gotzmann_number(HilbertPolynomial.parse("2T+1")) == 2, "gotzmann(2T+1)")
    grid = [(2, 1, 1), (3, 1, 2), (4, 2, 3), (2, 3, 2), (3, 2, 2), (5, 1, 3), (3, 3, 1), (2, 2, 5), (4, 1, 2), (6, 2, 2)]
    hand_reg = [1, 4, 729, 16, 16, 81, 1, 25, 8, 1024]
    for (n, r, d), want in zip(grid, hand_reg):
        c.require(regularity_bound(n, r, d) == want, f"regularity_bound{(n, r, d)}")
    dgrid = [(1, 0, 3), (1, 0, 1), (2, 1, 0), (1, 1, 2), (3, 0, 4), (2, 0, 2), (1, 2, 0), (4, 0, 6), (2, 0, 5), (3, 1, 1)]
    hand_del = [Fraction(1, 2), "inapplicable", 0, 1, 3, 0, 1, 8, 3, Fraction(3, 2)]
    for (g, gB, S), want in zip(dgrid, hand_del):
        c.require(deligne_bound(g, gB, S) == want, f"deligne_bound{(g, gB, S)} = {deligne_bound(g, gB, S)}")
    c.note("100 Zarhin tuples, Gotzmann 1 and 2, 10 + 10 grid values")
    return c.finish()


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(crit):
    assert crit()


if __name__ == "__main__":
    results = [crit() for crit in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
