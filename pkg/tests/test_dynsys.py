import random
from fractions import Fraction

import pytest
from flint import fmpq_poly, fmpz_mat

from ffht.dynsys import (
    BudgetExceeded,
    DegenerateMap,
    HomogeneousMap,
    bad_places,
    canonical_height,
    escape_rate,
    escape_rate_normalized,
    good_reduction,
    julia_radius_bound,
    macaulay_resultant,
    r_of_F,
    sylvester_resultant,
)
from ffht.forms import MPoly, monomials
from ffht.funcfield import INFINITY, Place, RationalFunction, as_rf, log_abs, parse, support
from ffht.projheights import ProjPoint, boundary_height_ratd, log_norm

T = Place.finite(parse("t"))


def fmap(*forms, normalize=True):
    return HomogeneousMap.from_strings(list(forms), normalize=normalize)


def coord_powers(N, d):
    return HomogeneousMap([MPoly.monomial(tuple(d if j == i else 0 for j in range(N + 1)), 1) for i in range(N + 1)])


def random_form(rng, nvars, d, coeff):
    return MPoly(nvars, {m: as_rf(coeff(rng)) for m in monomials(nvars, d)})


def linear_change(F, A):
    """F o A for an integer matrix A."""
    n = len(A)
    lin = [MPoly(n, {tuple(int(j == k) for j in range(n)): as_rf(A[i][k]) for k in range(n) if A[i][k]}) for i in range(n)]
    return HomogeneousMap([f.compose(lin) for f in F.forms], normalize=False)


def linear_after(F, A):
    """A o F."""
    n = len(A)
    forms = []
    for i in range(n):
        acc = MPoly(n, {})
        for k in range(n):
            if A[i][k]:
                acc = acc + F.forms[k] * A[i][k]
        forms.append(acc)
    return HomogeneousMap(forms, normalize=False)


# resultants -------------------------------------------------------------------


def test_coordinate_powers_have_unit_resultant():
    for N, d in [(1, 2), (1, 3), (2, 2), (2, 3)]:
        assert macaulay_resultant(coord_powers(N, d)) == 1


def test_degenerate_examples():
    F = fmap({(2, 0, 0): "1"}, {(1, 1, 0): "1"}, {(0, 2, 0): "1"})
    assert macaulay_resultant(F) == 0
    with pytest.raises(DegenerateMap):
        r_of_F(F, T)


def test_sylvester_against_univariate_resultant():
    # oracle: flint's resultant of the dehomogenized specializations
    rng = random.Random(1)
    for _ in range(50):
        d = rng.choice([2, 3])
        f = {(d - i, i): f"{rng.randint(-4, 4)}*t+{rng.randint(1, 5)}" for i in range(d + 1)}
        g = {(d - i, i): f"{rng.randint(1, 4)}*t^2-{rng.randint(0, 5)}" for i in range(d + 1)}
        F = fmap(f, g, normalize=False)
        res = macaulay_resultant(F)
        assert res == sylvester_resultant(*F.forms)
        for t0 in (-2, 0, 3, 7):
            fp = fmpq_poly([_at(f[(d - i, i)], t0) for i in range(d, -1, -1)])
            gp = fmpq_poly([_at(g[(d - i, i)], t0) for i in range(d, -1, -1)])
            if fp.degree() != d or gp.degree() != d:
                continue  # specialization dropped a degree
            assert _at_rf(res, t0) == fp.resultant(gp)


def _at(s, t0):
    return _at_rf(parse(s), t0)


def _at_rf(f, t0):
    return f.num(t0) / f.den(t0)


def test_macaulay_linear_change_identities():
    # Res(F o A) = det(A)^(d^(N+1)) Res(F) and Res(A o F) = det(A)^(d^N) Res(F)
    rng = random.Random(4)
    for N, d in [(1, 2), (2, 2)]:
        n = N + 1
        for _ in range(3):
            A = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
            dA = int(fmpz_mat(A).det())
            F = coord_powers(N, d)
            assert macaulay_resultant(linear_change(F, A)) == dA ** (d ** (N + 1))
            G = HomogeneousMap([random_form(rng, n, d, lambda r: r.randint(-3, 3)) for _ in range(n)], normalize=False)
            rG = macaulay_resultant(G)
            assert macaulay_resultant(linear_after(G, A)) == dA ** (d**N) * rG


def test_macaulay_diagonal_and_scaling():
    F = fmap({(2, 0, 0): "t"}, {(0, 2, 0): "2"}, {(0, 0, 2): "t+1"}, normalize=False)
    assert macaulay_resultant(F) == parse("(2*t*(t+1))^4")
    G = coord_powers(2, 2).scaled(parse("t-3"))
    assert macaulay_resultant(HomogeneousMap(G.forms, normalize=False)) == parse("(t-3)^12")


def test_macaulay_with_t_coefficients_vanishes_on_common_zero():
    # forms through the common point [1 : t : 1]
    x, y, z = (MPoly.variable(3, i) for i in range(3))
    tt = MPoly.constant(3, RationalFunction.t())
    a = y - tt * z
    b = x - z
    F = HomogeneousMap([a * x, b * y + a * z, a * y + b * x], normalize=False)
    assert macaulay_resultant(F) == 0


def test_resultant_cache_under_scaling():
    rng = random.Random(9)
    G = HomogeneousMap([random_form(rng, 3, 2, lambda r: r.randint(-3, 3)) for _ in range(3)])
    _ = G.resultant
    u = parse("t^2+1")
    H = G.scaled(u)
    assert H.resultant == macaulay_resultant(HomogeneousMap(H.forms, normalize=False))


# r(F), reduction, radius -----------------------------------------------------------


def test_r_of_F_examples():
    F = fmap({(2, 0): "t"}, {(0, 2): "1"}, normalize=False)
    assert F.resultant == parse("t^2")
    # -log|t^2|_(t) / (2 * 2 * 1) = 2/4
    assert r_of_F(F, T) == Fraction(1, 2)
    assert r_of_F(coord_powers(1, 2), T) == 0


def test_r_of_F_sums_to_zero():
    rng = random.Random(12)
    for _ in range(10):
        F = fmap(
            {(2, 0): "1", (1, 1): f"{rng.randint(-3, 3)}*t", (0, 2): f"t^2-{rng.randint(1, 4)}"},
            {(2, 0): f"{rng.randint(0, 2)}", (1, 1): "t+1", (0, 2): f"{rng.randint(1, 5)}*t"},
        )
        if F.resultant.is_zero():
            continue
        places = support([F.resultant])
        assert sum((r_of_F(F, v) for v in places), Fraction(0)) == 0


def test_good_reduction_and_bad_places():
    F = fmap({(2, 0): "1", (0, 2): "t"}, {(1, 1): "1"})
    assert bad_places(F) == [T, INFINITY]
    assert good_reduction(F, Place.finite(parse("t-1")))
    assert not good_reduction(F, T)


def test_julia_radius_bound():
    F = coord_powers(1, 2)
    assert julia_radius_bound(F, T) == 0
    G = fmap({(2, 0): "t"}, {(0, 2): "1"}, normalize=False)
    expected = (boundary_height_ratd(G, T) + log_norm(G, T)) / (G.d - 1)
    assert julia_radius_bound(G, T) == expected == 2
    # rescaled lifts, recomputed term by term from the formula
    for u in ("t", "1/t"):
        H = G.scaled(parse(u))
        e = -log_abs(H.resultant, T) + (H.N + 1) * (H.d**2) ** H.N * log_norm(H, T) + log_norm(H, T)
        assert julia_radius_bound(H, T) == e / (H.d - 1)
    assert julia_radius_bound(G.scaled(parse("1/t")), T) > julia_radius_bound(G, T)


# escape rates --------------------------------------------------------------------


def iterate_oracle(F, P, v, k):
    """d^-k log||F^k(P)||_v by explicit composition."""
    Fk = F.iterate(k)
    vals = Fk(P)
    return max(log_abs(c, v) for c in vals if not c.is_zero()) / Fraction(F.d) ** k


def test_escape_rate_good_reduction_shortcut():
    F = coord_powers(1, 2)
    r = escape_rate(F, [parse("1"), parse("1")], T, 5)
    assert (r.approx, r.error_bound, r.iterations) == (0, 0, 5)
    r = escape_rate(F, [parse("t"), parse("1")], T, 3)
    assert (r.approx, r.error_bound) == (0, 0)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_escape_rate_matches_composition(k):
    F = fmap({(2, 0): "1", (0, 2): "t"}, {(1, 1): "1"})
    for P in ([1, 1], [parse("t"), 1], [1, parse("t^2+t")], [parse("1/t"), 2]):
        P = [as_rf(c) for c in P]
        for v in (T, INFINITY):
            r = escape_rate(F, P, v, k)
            assert r.approx == iterate_oracle(F, P, v, k)
            assert escape_rate(F, P, v, k, residue="exact").approx == r.approx


def test_escape_rate_matches_composition_on_p2():
    rng = random.Random(21)
    F = HomogeneousMap([random_form(rng, 3, 2, lambda r: f"{r.randint(-2, 2)}*t+{r.randint(-2, 2)}") for _ in range(3)])
    P = [parse("t"), parse("1"), parse("t-1")]
    for v in height_of(F):
        for k in (1, 2, 3):
            assert escape_rate(F, P, v, k).approx == iterate_oracle(F, P, v, k)


def height_of(F):
    from ffht.dynsys import height_places

    return height_places(F)


def test_escape_rate_nesting_and_convergence():
    F = fmap({(2, 0): "1", (0, 2): "t"}, {(1, 1): "1"})
    P = [as_rf(1), as_rf(1)]
    prev = None
    for k in (1, 2, 4, 6, 10, 14):
        r = escape_rate(F, P, T, k)
        assert r.error_bound >= 0
        if prev is not None:
            assert r.within(prev)
            assert r.error_bound <= prev.error_bound / 2
        prev = r
    fine = escape_rate(F, P, T, 30)
    assert escape_rate(F, P, T, 4).contains(fine.approx)


def test_escape_rate_nesting_random_maps():
    rng = random.Random(33)
    for _ in range(5):
        F = fmap(
            {(2, 0): "1", (1, 1): f"{rng.randint(-3, 3)}*t", (0, 2): f"t^2-{rng.randint(1, 4)}"},
            {(1, 1): "t+1", (0, 2): f"{rng.randint(1, 5)}*t^2"},
        )
        if F.resultant.is_zero():
            continue
        P = [parse(f"t+{rng.randint(0, 3)}"), as_rf(1)]
        for v in bad_places(F):
            rs = [escape_rate(F, P, v, k) for k in (2, 5, 9)]
            assert rs[1].within(rs[0]) and rs[2].within(rs[1])


def test_normalized_escape_rate_agrees():
    F = fmap({(2, 0): "1", (0, 2): "t^3"}, {(1, 1): "t"})
    P = [as_rf(1), as_rf(1)]
    for v in (T, INFINITY):
        a = escape_rate(F, P, v, 12)
        b = escape_rate_normalized(F, P, v, 12)
        assert a.lo <= b.hi and b.lo <= a.hi
        assert b.error_bound <= a.error_bound


def test_escape_rate_lift_independence_exact():
    F = fmap({(2, 0): "1", (0, 2): "t"}, {(1, 1): "1"})
    P = [parse("t+2"), as_rf(1)]
    for u in ("t", "t^2+1", "3/(t-1)"):
        u = parse(u)
        G = F.scaled(u)
        for v in (T, INFINITY, Place.finite(parse("t^2+1")), Place.finite(parse("t-1"))):
            a = escape_rate_normalized(F, P, v, 8)
            b = escape_rate_normalized(G, P, v, 8)
            assert b.approx - a.approx == log_abs(u, v) / (F.d - 1)
            assert b.error_bound == a.error_bound


def test_escape_rate_budget():
    F = fmap({(2, 0): "1", (0, 2): "t"}, {(1, 1): "1"})
    with pytest.raises(BudgetExceeded):
        escape_rate(F, [as_rf(1), as_rf(1)], T, 20, residue="exact", budget=50)
    with pytest.raises(BudgetExceeded):
        F.iterate(6, budget=10)


def test_escape_rate_rejects_bad_input():
    F = coord_powers(1, 2)
    with pytest.raises(ValueError):
        escape_rate(F, [0, 0], T, 2)
    with pytest.raises(ValueError):
        escape_rate(F, [1, 1], T, -1)


# canonical heights --------------------------------------------------------------


def test_canonical_height_power_map():
    F = coord_powers(1, 2)
    assert tuple(canonical_height(F, ProjPoint([parse("t"), 1]), 6)) == (1, 0)
    assert tuple(canonical_height(F, ProjPoint([1, 0]), 6)) == (0, 0)
    G = coord_powers(2, 3)
    assert tuple(canonical_height(G, ProjPoint([1, 0, 0]), 4)) == (0, 0)
    assert canonical_height(G, ProjPoint([parse("t^2"), 1, parse("t")]), 4).approx == 2


def test_canonical_height_fixed_point():
    # f(x) = x^2 + t - t^2 fixes x = t
    F = fmap({(2, 0): "1", (0, 2): "t-t^2"}, {(0, 2): "1"})
    h = canonical_height(F, ProjPoint([parse("t"), 1]), 12)
    assert h.contains(0)
    # x = -t is a preimage of the fixed point
    h = canonical_height(F, ProjPoint([parse("-t"), 1]), 12)
    assert h.contains(0)


def test_canonical_height_functional_equation():
    F = fmap({(2, 0): "1", (0, 2): "t"}, {(1, 1): "1", (0, 2): "1"})
    rng = random.Random(17)
    for _ in range(20):
        P = ProjPoint([parse(f"{rng.randint(-5, 5)}*t+{rng.randint(-5, 5)}"), as_rf(rng.randint(1, 4))])
        h = canonical_height(F, P, 12)
        hf = canonical_height(F, F.image(P), 12)
        assert abs(hf.approx - 2 * h.approx) <= hf.error_bound + 2 * h.error_bound
        assert h.hi >= 0


def test_canonical_height_map_lift_independence():
    F = fmap({(2, 0): "1", (0, 2): "t"}, {(1, 1): "1", (0, 2): "1"})
    P = ProjPoint([parse("t^2-1"), as_rf(3)])
    base = canonical_height(F, P, 10)
    for u in ("t", "(t+1)/(t^2+2)", "5"):
        h = canonical_height(F.scaled(parse(u)), P, 10)
        assert h.approx == base.approx
        assert h.lo <= base.hi and base.lo <= h.hi


def test_canonical_height_point_representative_independence():
    F = fmap({(2, 0): "1", (0, 2): "t"}, {(1, 1): "1", (0, 2): "1"})
    P = ProjPoint([parse("t+1"), as_rf(2)])
    assert tuple(canonical_height(F, P.scaled(parse("t^3/(t-7)")), 8)) == tuple(canonical_height(F, P, 8))


def test_map_json_round_trip():
    F = fmap({(2, 0): "1", (0, 2): "t/3"}, {(1, 1): "t^2-1"})
    assert HomogeneousMap.from_json(F.to_json()) == F
