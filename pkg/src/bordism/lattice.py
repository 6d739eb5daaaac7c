"""Integer row lattices kept in Hermite normal form.

Rows are inserted one at a time with extended-gcd row operations, in the
spirit of an incremental echelon form, and entries above each pivot are
reduced into ``[0, pivot)`` so the basis is canonical.
"""

from __future__ import annotations

from math import lcm
from typing import Iterable, Sequence

from gmpy2 import mpq


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (x, y, g) with x*a + y*b == g == gcd(a, b) >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


class IntLattice:
    """Z-row span of integer vectors of a fixed dimension, in HNF."""

    __slots__ = ("dim", "_rows", "_pivot_of_col", "_dirty")

    def __init__(self, dim: int, vectors: Iterable[Sequence[int]] = ()):
        self.dim = dim
        self._rows: list[list[int]] = []
        self._pivot_of_col: dict[int, int] = {}
        self._dirty = False
        for v in vectors:
            self.add(v)
        self._normalize()

    @property
    def rank(self) -> int:
        return len(self._rows)

    def basis(self) -> list[list[int]]:
        self._normalize()
        return [list(r) for r in self._rows]

    def _normalize(self):
        if self._dirty:
            self._reduce_above()
            self._dirty = False

    def pivots(self) -> list[int]:
        return sorted(self._pivot_of_col)

    def _row_with_pivot(self, j):
        i = self._pivot_of_col.get(j)
        return None if i is None else self._rows[i]

    def add(self, vec: Sequence[int]) -> None:
        if len(vec) != self.dim:
            raise ValueError(f"expected a vector of length {self.dim}")
        v = [int(x) for x in vec]
        dim = self.dim
        for j in range(dim):
            if not v[j]:
                continue
            row = self._row_with_pivot(j)
            if row is None:
                if v[j] < 0:
                    v = [-x for x in v]
                self._rows.append(v)
                self._rebuild()
                self._dirty = True
                return
            a, b = row[j], v[j]
            if b % a == 0:
                q = b // a
                for k in range(j, dim):
                    v[k] -= q * row[k]
            else:
                x, y, g = xgcd(a, b)
                ag, bg = a // g, b // g
                for k in range(j, dim):
                    ra, vb = row[k], v[k]
                    row[k] = x * ra + y * vb
                    v[k] = -bg * ra + ag * vb
        self._dirty = True

    def _rebuild(self):
        self._rows.sort(key=lambda r: next(j for j, x in enumerate(r) if x))
        self._pivot_of_col = {
            next(j for j, x in enumerate(r) if x): i for i, r in enumerate(self._rows)
        }

    def _reduce_above(self):
        rows = self._rows
        for i, r in enumerate(rows):
            j = next(k for k, x in enumerate(r) if x)
            if r[j] < 0:
                rows[i] = r = [-x for x in r]
            p = r[j]
            for i2 in range(i):
                r2 = rows[i2]
                q = r2[j] // p
                if q:
                    for k in range(j, self.dim):
                        r2[k] -= q * r[k]

    def coordinates(self, vec: Sequence[int]) -> list[int] | None:
        """Integer coefficients expressing ``vec`` in the basis, or None."""
        self._normalize()
        v = [int(x) for x in vec]
        coeffs = []
        for r in self._rows:
            j = next(k for k, x in enumerate(r) if x)
            for k in range(j):
                if v[k]:
                    return None
            q, rem = divmod(v[j], r[j])
            if rem:
                return None
            coeffs.append(q)
            if q:
                for k in range(j, self.dim):
                    v[k] -= q * r[k]
        if any(v):
            return None
        return coeffs

    def __contains__(self, vec) -> bool:
        return self.coordinates(vec) is not None


class RationalLattice:
    """A lattice of rational vectors stored as ``(1/den) * IntLattice``."""

    __slots__ = ("den", "ints")

    def __init__(self, vectors: Sequence[Sequence], dim: int):
        vectors = [[mpq(x) for x in v] for v in vectors]
        den = 1
        for v in vectors:
            for x in v:
                den = lcm(den, int(x.denominator))
        self.den = den
        self.ints = IntLattice(dim, ([int(x * den) for x in v] for v in vectors))

    @property
    def rank(self) -> int:
        return self.ints.rank

    def basis(self) -> list[list[mpq]]:
        return [[mpq(x, self.den) for x in r] for r in self.ints.basis()]

    def __contains__(self, vec) -> bool:
        scaled = []
        for x in vec:
            y = mpq(x) * self.den
            if y.denominator != 1:
                return False
            scaled.append(int(y))
        return scaled in self.ints
