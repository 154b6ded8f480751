"""Good bases of degree-n sections built from coordinates of iterates."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, product
from math import comb
from typing import Sequence

from .dynsys import HomogeneousMap
from .forms import MPoly, monomial_str, monomials
from .funcfield import RationalFunction
from .linalg import Echelon, det

__all__ = [
    "Descriptor",
    "SectionFamily",
    "ProjectiveSpace",
    "PlaneCubic",
    "GreenBasis",
    "SpanningFailure",
    "spanning_family",
    "extract_basis",
    "change_of_basis_det",
]


class SpanningFailure(ValueError):
    def __init__(self, rank: int, needed: int):
        super().__init__(f"spanning failure: good-basis hypothesis violated (rank {rank} < {needed})")
        self.rank = rank
        self.needed = needed


@dataclass(frozen=True)
class Descriptor:
    """eta * prod (F_i^(l))^j, stored as (eta, ((i, l, j), ...))."""

    eta: tuple[int, ...]
    factors: tuple[tuple[int, int, int], ...] = ()

    def __str__(self):
        parts = [] if not any(self.eta) and self.factors else [monomial_str(self.eta)]
        for i, l, j in self.factors:
            parts.append(f"F{i}^({l})" + (f"^{j}" if j > 1 else ""))
        return "*".join(parts)

    def to_json(self) -> dict:
        return {"eta": list(self.eta), "factors": [list(f) for f in self.factors]}


@dataclass
class SectionFamily:
    n: int
    members: list[tuple[MPoly, Descriptor]]
    F: HomogeneousMap

    def __len__(self):
        return len(self.members)

    def rebuild(self, desc: Descriptor) -> MPoly:
        """Multiply out a descriptor; must reproduce the stored member."""
        iters = _iterates(self.F, max((l for _, l, _ in desc.factors), default=0))
        out = MPoly.monomial(desc.eta, 1)
        for i, l, j in desc.factors:
            out = out * iters[l].forms[i] ** j
        return out


def _ceil_log(n: int, d: int) -> int:
    k, p = 0, 1
    while p < n:
        p *= d
        k += 1
    return k


def _iterates(F: HomogeneousMap, depth: int) -> dict[int, HomogeneousMap]:
    out = {}
    G = None
    for l in range(1, depth + 1):
        G = F if G is None else F.compose(G)
        out[l] = G
    return out


def spanning_family(F: HomogeneousMap, n: int) -> SectionFamily:
    """Standard monomials for n < d(N+1); otherwise iterate-coordinate products.

    Each product uses distinct pairs (i, l), exponents 1 <= j <= d-1, depth
    l <= ceil(log_d n), and leaves a residual monomial of degree < d(N+1).
    """
    if n < 1:
        raise ValueError("n must be positive")
    N, d = F.N, F.d
    nv = N + 1
    cutoff = d * nv
    if n < cutoff:
        return SectionFamily(n, [(MPoly.monomial(m, 1), Descriptor(m)) for m in monomials(nv, n)], F)
    depth = _ceil_log(n, d)
    iters = _iterates(F, depth)
    slots = [(i, l) for l in range(depth, 0, -1) for i in range(nv)]
    members = []
    powers: dict = {}
    for size in range(1, len(slots) + 1):
        for chosen in combinations(slots, size):
            if sum(d**l for _, l in chosen) > n:
                continue
            for js in product(range(1, d), repeat=size):
                fdeg = sum(j * d**l for (_, l), j in zip(chosen, js))
                rest = n - fdeg
                if rest < 0 or rest >= cutoff:
                    continue
                factors = tuple((i, l, j) for (i, l), j in zip(chosen, js))
                G = MPoly.constant(nv, 1)
                for i, l, j in factors:
                    key = (i, l, j)
                    if key not in powers:
                        powers[key] = iters[l].forms[i] ** j
                    G = G * powers[key]
                for eta in monomials(nv, rest):
                    members.append((MPoly.monomial(eta, 1) * G, Descriptor(eta, factors)))
    return SectionFamily(n, members, F)


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class ProjectiveSpace:
    N: int

    def dimension(self, n: int) -> int:
        return comb(n + self.N, self.N)

    def coordinates(self, n: int) -> list[tuple[int, ...]]:
        return monomials(self.N + 1, n)

    def normal_form(self, f: MPoly) -> MPoly:
        return f

    def contains(self, point: Sequence[RationalFunction]) -> bool:
        return len(point) == self.N + 1

    def to_json(self):
        return {"kind": "ProjectiveSpace", "N": self.N}


class PlaneCubic:
    """A Weierstrass cubic in P^2; normal forms modulo it under grlex x > y > z.

    The leading monomial of the cubic is x^3, so normal forms are spanned
    by monomials of x-degree at most 2, which gives c(n) = 3n.
    """

    N = 2

    def __init__(self, curve):
        from .elliptic import _weierstrass_form

        self.curve = curve
        W = _weierstrass_form(curve)
        lead = W.coefficient((3, 0, 0))
        # x^3 = x^3 - W / lead
        self.tail = {e: -c / lead for e, c in W.terms.items() if e != (3, 0, 0)}

    def dimension(self, n: int) -> int:
        return 3 * n if n >= 1 else 1

    def coordinates(self, n: int) -> list[tuple[int, ...]]:
        return [m for m in monomials(3, n) if m[0] <= 2]

    def normal_form(self, f: MPoly) -> MPoly:
        terms = dict(f.terms)
        while True:
            high = [e for e in terms if e[0] >= 3]
            if not high:
                return MPoly(3, terms)
            e = max(high)
            c = terms.pop(e)
            base = (e[0] - 3, e[1], e[2])
            for t, tc in self.tail.items():
                m = (base[0] + t[0], base[1] + t[1], base[2] + t[2])
                terms[m] = terms[m] + c * tc if m in terms else c * tc
                if terms[m].is_zero():
                    del terms[m]

    def contains(self, point: Sequence[RationalFunction]) -> bool:
        from .elliptic import _weierstrass_form

        return len(point) == 3 and _weierstrass_form(self.curve)(point).is_zero()

    def to_json(self):
        return {"kind": "PlaneCubic", "curve": self.curve.to_json()}


@dataclass
class GreenBasis:
    n: int
    sections: list[MPoly]
    descriptors: list[Descriptor]
    target: ProjectiveSpace | PlaneCubic

    @property
    def size(self) -> int:
        return len(self.sections)

    def evaluation_matrix(self, lifts: Sequence[Sequence[RationalFunction]]) -> list[list[RationalFunction]]:
        return [[s(P) for s in self.sections] for P in lifts]

    def coordinate_matrix(self) -> list[list[RationalFunction]]:
        """Rows: normal forms of the sections in the target's monomial coordinates."""
        cols = self.target.coordinates(self.n)
        out = []
        for s in self.sections:
            nf = self.target.normal_form(s)
            out.append([nf.coefficient(m) for m in cols])
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "target": self.target.to_json(),
            "sections": [{"descriptor": d.to_json(), "form": s.to_records()} for s, d in zip(self.sections, self.descriptors)],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def extract_basis(fam: SectionFamily, target) -> GreenBasis:
    """First-independent greedy selection in family order."""
    n = fam.n
    cols = target.coordinates(n)
    need = target.dimension(n)
    assert len(cols) == need
    ech = Echelon(len(cols))
    chosen, descs = [], []
    for f, desc in fam.members:
        nf = target.normal_form(f)
        if ech.add([nf.coefficient(m) for m in cols]):
            chosen.append(f)
            descs.append(desc)
            if len(chosen) == need:
                return GreenBasis(n, chosen, descs, target)
    raise SpanningFailure(ech.rank, need)


def change_of_basis_det(B1: GreenBasis, B2: GreenBasis) -> RationalFunction:
    """det of the matrix expressing B2 in terms of B1."""
    if B1.n != B2.n:
        raise ValueError("bases of different degree")
    return det(B2.coordinate_matrix()) / det(B1.coordinate_matrix())
