"""Exact linear algebra over Q(t)."""

from __future__ import annotations

from typing import Sequence

from flint import fmpq_poly

from .funcfield import ONE, ZERO, RationalFunction, as_rf

__all__ = ["det", "Echelon", "rank"]


def _bareiss(rows: list[list[fmpq_poly]]) -> fmpq_poly:
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = fmpq_poly([1])
    for k in range(n - 1):
        if m[k][k].is_zero():
            for r in range(k + 1, n):
                if not m[r][k].is_zero():
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return fmpq_poly([0])
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return m[n - 1][n - 1] * sign if n else fmpq_poly([1])


def det(matrix: Sequence[Sequence]) -> RationalFunction:
    """Determinant of a square matrix over Q(t), by fraction-free elimination."""
    n = len(matrix)
    if n == 0:
        return ONE
    rows = []
    scale = ONE
    for row in matrix:
        row = [as_rf(x) for x in row]
        if len(row) != n:
            raise ValueError("matrix is not square")
        common = fmpq_poly([1])
        for x in row:
            g = common.gcd(x.den)
            common = common * (x.den // g)
        rows.append([x.num * (common // x.den) for x in row])
        scale = scale * RationalFunction(common, _reduced=True)
    return RationalFunction(_bareiss(rows)) / scale


class Echelon:
    """Incrementally maintained row-echelon basis of vectors over Q(t)."""

    def __init__(self, width: int):
        self.width = width
        self.rows: list[tuple[int, list[RationalFunction]]] = []  # (pivot column, normalized row)

    def reduce(self, vec: Sequence) -> list[RationalFunction]:
        v = [as_rf(x) for x in vec]
        for col, row in self.rows:
            c = v[col]
            if not c.is_zero():
                v = [a - c * b if not b.is_zero() else a for a, b in zip(v, row)]
        return v

    def add(self, vec: Sequence) -> bool:
        """Insert ``vec``; return True when it was independent of the basis."""
        v = self.reduce(vec)
        for col, x in enumerate(v):
            if not x.is_zero():
                inv = x.inverse()
                v = [y * inv for y in v]
                # keep the basis fully reduced so later reductions stay single-pass
                for i, (c2, row) in enumerate(self.rows):
                    a = row[col]
                    if not a.is_zero():
                        self.rows[i] = (c2, [r - a * s for r, s in zip(row, v)])
                self.rows.append((col, v))
                return True
        return False

    @property
    def rank(self) -> int:
        return len(self.rows)


def rank(vectors: Sequence[Sequence], width: int | None = None) -> int:
    if not vectors:
        return 0
    ech = Echelon(width or len(vectors[0]))
    for v in vectors:
        ech.add(v)
    return ech.rank


def zero_vector(n: int) -> list[RationalFunction]:
    return [ZERO] * n
