"""Arakelov-Green's functions g_n attached to a good basis.

For a tuple P_1..P_c (c = c(n)) and a place v, with lifts whose largest
coordinate is a v-unit,

    g_n = (1/c) sum_i H_{F,v}(P_i) - log|det(s_j(P_i))|_v / (n c) + r_v(F).

The escape-rate part is a certified interval; the other two terms are exact.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dynsys import HomogeneousMap, escape_rate_normalized, height_places, canonical_height, julia_radius_bound, r_of_F
from .funcfield import INFINITY, Place, log_abs, support
from .goodbasis import GreenBasis
from .linalg import det
from .projheights import ProjPoint, unit_lift

__all__ = [
    "GreenValue",
    "GlobalIdentity",
    "MonitorReport",
    "green_value",
    "global_green_identity",
    "lower_bound_monitor",
    "sweep_csv",
]

INF = math.inf


@dataclass(frozen=True)
class GreenValue:
    place: Place
    n: int
    escape_sum: Fraction
    escape_error: Fraction
    det_logabs: Fraction | None  # None: the determinant vanishes
    rF: Fraction
    c: int

    @property
    def is_infinite(self) -> bool:
        return self.det_logabs is None

    @property
    def value(self) -> Fraction | float:
        if self.det_logabs is None:
            return INF
        return self.escape_sum / self.c - self.det_logabs / (self.n * self.c) + self.rF

    @property
    def error(self) -> Fraction:
        return self.escape_error / self.c

    @property
    def lo(self):
        return self.value if self.is_infinite else self.value - self.error

    @property
    def hi(self):
        return self.value if self.is_infinite else self.value + self.error

    def to_json(self) -> dict:
        fmt = lambda x: "inf" if x == INF else str(x)  # noqa: E731
        return {
            "place": str(self.place),
            "n": self.n,
            "value": {"lo": fmt(self.lo), "hi": fmt(self.hi)},
            "escape_sum": {"lo": str(self.escape_sum - self.escape_error), "hi": str(self.escape_sum + self.escape_error)},
            "det_logabs": "-inf" if self.det_logabs is None else str(self.det_logabs),
            "rF": str(self.rF),
        }


def _check_points(basis: GreenBasis, points: Sequence[ProjPoint]) -> list[ProjPoint]:
    points = [p if isinstance(p, ProjPoint) else ProjPoint(p) for p in points]
    if len(points) != basis.size:
        raise ValueError(f"need exactly c(n) = {basis.size} points, got {len(points)}")
    for P in points:
        if not basis.target.contains(P.canonical()):
            raise ValueError(f"point {P} is not on the target variety")
    return points


def green_value(basis: GreenBasis, F: HomogeneousMap, points: Sequence, v: Place, k: int = 12, **kw) -> GreenValue:
    points = _check_points(basis, points)
    lifts = [unit_lift(P.canonical(), v) for P in points]
    D = det(basis.evaluation_matrix(lifts))
    esc = Fraction(0)
    err = Fraction(0)
    for lift in lifts:
        r = escape_rate_normalized(F, lift, v, k, **kw)
        esc += r.approx
        err += r.error_bound
    det_term = None if D.is_zero() else log_abs(D, v)
    return GreenValue(v, basis.n, esc, err, det_term, r_of_F(F, v), basis.size)


@dataclass(frozen=True)
class GlobalIdentity:
    applicable: bool
    det_place_sum: Fraction | None
    rF_sum: Fraction | None
    lhs: tuple[Fraction, Fraction] | None
    rhs: tuple[Fraction, Fraction] | None
    per_place: list[GreenValue] = field(default_factory=list)

    @property
    def overlap(self) -> bool:
        return self.applicable and self.lhs[0] <= self.rhs[1] and self.rhs[0] <= self.lhs[1]

    def to_json(self) -> dict:
        if not self.applicable:
            return {"applicable": False, "reason": "identity not applicable: evaluation determinant vanishes"}
        iv = lambda p: {"lo": str(p[0]), "hi": str(p[1])}  # noqa: E731
        return {
            "applicable": True,
            "det_place_sum": str(self.det_place_sum),
            "rF_sum": str(self.rF_sum),
            "lhs": iv(self.lhs),
            "rhs": iv(self.rhs),
            "overlap": self.overlap,
            "places": [g.to_json() for g in self.per_place],
        }


def global_green_identity(basis: GreenBasis, F: HomogeneousMap, points: Sequence, k: int = 12, **kw) -> GlobalIdentity:
    """Sum over places of g_n against the average canonical height.

    The determinant at canonical lifts is an element of K^x, so its log
    absolute values sum to zero; the same holds for Res(F).
    """
    points = _check_points(basis, points)
    lifts = [P.canonical() for P in points]
    D = det(basis.evaluation_matrix(lifts))
    if D.is_zero():
        return GlobalIdentity(False, None, None, None, None)
    det_sum = sum((log_abs(D, v) for v in support([D])), Fraction(0))
    rF_places = support([F.resultant])
    rF_sum = sum((r_of_F(F, v) for v in rF_places), Fraction(0))

    coords = [c for lift in lifts for c in lift if not c.is_zero()]
    places = sorted(support([D, *coords]) | set(height_places(F)) | {INFINITY})
    per_place = [green_value(basis, F, points, v, k, **kw) for v in places]
    lo = sum((g.lo for g in per_place), Fraction(0))
    hi = sum((g.hi for g in per_place), Fraction(0))

    c = basis.size
    hs = [canonical_height(F, P, k, **kw) for P in points]
    r_lo = sum((h.lo for h in hs), Fraction(0)) / c
    r_hi = sum((h.hi for h in hs), Fraction(0)) / c
    return GlobalIdentity(True, det_sum, rF_sum, (lo, hi), (r_lo, r_hi), per_place)


@dataclass
class MonitorReport:
    n: int
    place: Place
    rF: Fraction
    log_radius: Fraction
    samples: int
    infinite: int
    min_excess: Fraction | None  # min over samples of g_n - r_v(F), using the interval's lower end
    scale: float  # max(log R, 1) * log(n) / n
    empirical_constant: float  # smallest B with g_n >= r_v(F) - B * scale on the samples
    rows: list[GreenValue] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "place": str(self.place),
            "rF": str(self.rF),
            "log_radius": str(self.log_radius),
            "samples": self.samples,
            "infinite": self.infinite,
            "min_excess": None if self.min_excess is None else str(self.min_excess),
            "scale": self.scale,
            "empirical_constant": self.empirical_constant,
        }


def lower_bound_monitor(basis: GreenBasis, F: HomogeneousMap, v: Place, samples: Sequence[Sequence], k: int = 12) -> MonitorReport:
    """Observed g_n - r_v(F) against the (log n)/n deficit scale.

    The constant in the lower bound is not explicit, so this only records
    the smallest constant consistent with the samples.
    """
    rF = r_of_F(F, v)
    logR = julia_radius_bound(F, v)
    n = basis.n
    scale = max(float(logR), 1.0) * math.log(n) / n if n > 1 else 0.0
    rows = []
    excess = []
    infinite = 0
    for tup in samples:
        g = green_value(basis, F, tup, v, k)
        rows.append(g)
        if g.is_infinite:
            infinite += 1
        else:
            excess.append(g.lo - rF)
    m = min(excess) if excess else None
    if m is None or m >= 0:
        B = 0.0
    else:
        B = float(-m) / scale if scale > 0 else math.inf
    return MonitorReport(n, v, rF, logR, len(rows), infinite, m, scale, B, rows)


def sweep_csv(values: Sequence[GreenValue]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "place", "value_lo", "value_hi", "det_logabs", "rF"])
    for g in values:
        lo = "inf" if g.is_infinite else str(g.lo)
        hi = "inf" if g.is_infinite else str(g.hi)
        w.writerow([g.n, str(g.place), lo, hi, "-inf" if g.det_logabs is None else str(g.det_logabs), str(g.rF)])
    return buf.getvalue()
