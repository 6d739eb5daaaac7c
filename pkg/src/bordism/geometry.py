"""Torus manifolds built from projectivized line sums, and their fixed-point data.

``Proj(lines)`` is P(L_0 + ... + L_n) where L_i has character ``lines[i]``.
Its fixed set has one component per distinct character lam, a copy of
CP^{m-1} (m = multiplicity of lam) whose normal bundle is the sum over other
characters lam' of O(1)^{m'} twisted by lam' - lam.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .borel import Weight
from .errors import ParseError, PreconditionError
from .fixedring import FixedDatum, FixedMonomial
from .mu import ONE, ZERO, MuElement


class ManifoldExpr:
    """Base class of the manifold expression tree."""

    def rank(self) -> int | None:
        raise NotImplementedError

    def dimension(self) -> int:
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError

    def to_sexpr(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.to_sexpr()


@dataclass(frozen=True)
class Point(ManifoldExpr):
    def rank(self):
        return None

    def dimension(self) -> int:
        return 0

    def to_json(self):
        return "point"

    def to_sexpr(self) -> str:
        return "point"

    def __str__(self):
        return "point"


@dataclass(frozen=True)
class Proj(ManifoldExpr):
    lines: tuple

    def __post_init__(self):
        lines = tuple(tuple(int(a) for a in line) for line in self.lines)
        if not lines:
            raise PreconditionError("a projectivization needs at least one line")
        if len({len(line) for line in lines}) != 1 or not lines[0]:
            raise PreconditionError("all lines need characters of the same positive rank")
        object.__setattr__(self, "lines", lines)

    def rank(self):
        return len(self.lines[0])

    def dimension(self) -> int:
        return 2 * (len(self.lines) - 1)

    def canonical(self) -> "Proj":
        """Sorted lines, translated so the smallest is zero (same manifold)."""
        base = min(self.lines)
        return Proj(tuple(sorted(tuple(a - b for a, b in zip(line, base)) for line in self.lines)))

    def fixed_components(self) -> list:
        """[(lam, n, {normal weight: multiplicity})] with the component a CP^n."""
        counts: dict = {}
        for line in self.lines:
            counts[line] = counts.get(line, 0) + 1
        out = []
        for lam, m in sorted(counts.items()):
            normal = {}
            for lam2, m2 in counts.items():
                if lam2 != lam:
                    normal[Weight(tuple(a - b for a, b in zip(lam2, lam)))] = m2
            out.append((lam, m - 1, dict(sorted(normal.items()))))
        return out

    def to_json(self):
        return ["proj", [list(line) for line in self.lines]]

    def to_sexpr(self) -> str:
        return "(proj " + " ".join("(" + " ".join(str(a) for a in line) + ")" for line in self.lines) + ")"


@dataclass(frozen=True)
class Product(ManifoldExpr):
    left: ManifoldExpr
    right: ManifoldExpr

    def rank(self):
        return _join_rank(self.left.rank(), self.right.rank())

    def dimension(self) -> int:
        return self.left.dimension() + self.right.dimension()

    def to_json(self):
        return ["prod", self.left.to_json(), self.right.to_json()]

    def to_sexpr(self) -> str:
        return f"(prod {self.left.to_sexpr()} {self.right.to_sexpr()})"


@dataclass(frozen=True)
class DisjointUnion(ManifoldExpr):
    parts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise PreconditionError("a disjoint union needs at least one part")
        object.__setattr__(self, "parts", parts)

    def rank(self):
        r = None
        for p in self.parts:
            r = _join_rank(r, p.rank())
        return r

    def dimension(self) -> int:
        dims = {p.dimension() for p in self.parts}
        if len(dims) != 1:
            raise PreconditionError(f"disjoint union of manifolds of different dimensions {sorted(dims)}")
        return dims.pop()

    def to_json(self):
        return ["union"] + [p.to_json() for p in self.parts]

    def to_sexpr(self) -> str:
        return "(union " + " ".join(p.to_sexpr() for p in self.parts) + ")"


def _join_rank(a, b):
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise PreconditionError(f"torus ranks {a} and {b} do not match")


def manifold_from_json(obj) -> ManifoldExpr:
    if obj == "point":
        return Point()
    if not isinstance(obj, list) or not obj or not isinstance(obj[0], str):
        raise ParseError(f"expected 'point' or [tag, ...], got {obj!r}")
    tag, args = obj[0], obj[1:]
    if tag == "proj":
        if len(args) != 1 or not isinstance(args[0], list) or not args[0]:
            raise ParseError("proj takes one nonempty list of integer vectors")
        for line in args[0]:
            if not isinstance(line, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in line):
                raise ParseError(f"proj lines are integer vectors, got {line!r}")
        try:
            return Proj(tuple(tuple(line) for line in args[0]))
        except PreconditionError as exc:
            raise ParseError(str(exc)) from exc
    if tag == "prod":
        if len(args) < 2:
            raise ParseError("prod takes at least two factors")
        out = manifold_from_json(args[0])
        for a in args[1:]:
            out = Product(out, manifold_from_json(a))
        return out
    if tag == "union":
        if not args:
            raise ParseError("union takes at least one part")
        return DisjointUnion(tuple(manifold_from_json(a) for a in args))
    raise ParseError(f"unknown manifold constructor {tag!r}")


# ---------------------------------------------------------------------------
# fixed-point data


def cp_universal(n: int) -> MuElement:
    """[CP^n] = (n+1) m_n, with no truncation."""
    if n == 0:
        return ONE
    return MuElement.gen(n).scale(n + 1)


@lru_cache(maxsize=None)
def _cp_inverse_coeffs(n: int) -> tuple:
    # q_0..q_n with (sum [CP^j] t^j)(sum q_j t^j) = 1
    q = [ONE]
    for j in range(1, n + 1):
        acc = ZERO
        for i in range(1, j + 1):
            acc = acc + cp_universal(i) * q[j - i]
        q.append(-acc)
    return tuple(q)


@lru_cache(maxsize=None)
def _line_series(w: Weight, n: int) -> tuple:
    # Coefficients B_0..B_n of the fixed-point class of O(1) (x) V_w over
    # CP^j, arranged so the pushforward of 1/(x +_F e) over CP^{d-1}
    # reproduces Y_{w,d}; Y_{w,1} stands for e_w^{-1}.
    q = _cp_inverse_coeffs(n)
    ys = [FixedDatum.y_class(w, i + 1) for i in range(n + 1)]
    out = []
    for j in range(n + 1):
        acc = FixedDatum(w.rank)
        for i in range(j + 1):
            acc = acc + ys[i].scale(q[j - i])
        out.append(acc)
    return tuple(out)


def _series_mul(a: list, b: list, n: int, rank: int) -> list:
    out = [FixedDatum(rank) for _ in range(n + 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j in range(0, n + 1 - i):
            if not b[j].is_zero():
                out[i + j] = out[i + j] + x * b[j]
    return out


def component_class(n: int, normal: dict, rank: int) -> FixedDatum:
    """Fixed-point class of CP^n with normal bundle sum_w O(1)^{s_w} (x) V_w."""
    acc = [FixedDatum.one(rank)] + [FixedDatum(rank) for _ in range(n)]
    for w, s in normal.items():
        ser = list(_line_series(w, n))
        for _ in range(s):
            acc = _series_mul(acc, ser, n, rank)
    out = FixedDatum(rank)
    for k in range(n + 1):
        out = out + acc[k].scale(cp_universal(n - k))
    return out


def phi_omega(m: ManifoldExpr, rank: int | None = None) -> FixedDatum:
    """Sum over fixed components of their fixed-point classes."""
    r = m.rank() if rank is None else rank
    if r is None:
        r = 1
    if m.rank() is not None and m.rank() != r:
        raise PreconditionError(f"expression has rank {m.rank()}, asked for {r}")
    return _phi(m, r)


def _phi(m, r):
    if isinstance(m, Point):
        return FixedDatum.one(r)
    if isinstance(m, Proj):
        return _phi_proj(m.canonical(), r)
    if isinstance(m, Product):
        return _phi(m.left, r) * _phi(m.right, r)
    if isinstance(m, DisjointUnion):
        out = FixedDatum(r)
        for p in m.parts:
            out = out + _phi(p, r)
        return out
    raise PreconditionError(f"not a manifold expression: {m!r}")


@lru_cache(maxsize=4096)
def _phi_proj(p: Proj, r: int) -> FixedDatum:
    out = FixedDatum(r)
    for _, n, normal in p.fixed_components():
        out = out + component_class(n, normal, r)
    return out


def underlying_class(m: ManifoldExpr) -> MuElement:
    """Nonequivariant bordism class of the underlying manifold."""
    if isinstance(m, Point):
        return ONE
    if isinstance(m, Proj):
        return cp_universal(len(m.lines) - 1)
    if isinstance(m, Product):
        return underlying_class(m.left) * underlying_class(m.right)
    if isinstance(m, DisjointUnion):
        out = ZERO
        for p in m.parts:
            out = out + underlying_class(p)
        return out
    raise PreconditionError(f"not a manifold expression: {m!r}")


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class CatalogBounds:
    """Enumeration limits. ``compound_lines`` caps the factors used in products and unions."""

    max_lines: int = 5
    max_entry: int = 3
    compound_lines: int = 3
    products: bool = True
    unions: bool = True
    max_compound: int | None = None

    @classmethod
    def default(cls, r: int) -> "CatalogBounds":
        if r == 1:
            return cls(max_lines=5, max_entry=3, compound_lines=3, max_compound=40)
        if r == 2:
            return cls(max_lines=3, max_entry=2, compound_lines=2, max_compound=30)
        return cls(max_lines=2, max_entry=1, compound_lines=2, max_compound=10)


def _line_box(r: int, w: int) -> list:
    return sorted(itertools.product(range(-w, w + 1), repeat=r))


def catalog(r: int, bounds: CatalogBounds | None = None) -> list[ManifoldExpr]:
    """Deterministic duplicate-free list of test manifolds of rank r."""
    if r < 1:
        raise PreconditionError("rank must be >= 1")
    b = bounds or CatalogBounds.default(r)
    zero = (0,) * r
    higher = [v for v in _line_box(r, b.max_entry) if v >= zero]
    projs = []
    seen = set()
    for k in range(2, b.max_lines + 1):
        for rest in itertools.combinations_with_replacement(higher, k - 1):
            p = Proj((zero,) + rest).canonical()
            if max(abs(a) for line in p.lines for a in line) > b.max_entry or p in seen:
                continue
            seen.add(p)
            projs.append(p)
    out: list = [Point()] + projs
    small = [p for p in projs if len(p.lines) <= b.compound_lines]
    compounds = []
    if b.products:
        for i, j in itertools.combinations_with_replacement(range(len(small)), 2):
            compounds.append(Product(small[i], small[j]))
    if b.unions:
        for i, j in itertools.combinations(range(len(small)), 2):
            if small[i].dimension() == small[j].dimension():
                compounds.append(DisjointUnion((small[i], small[j])))
    if b.max_compound is not None and len(compounds) > b.max_compound:
        # spread the selection evenly so both kinds stay represented
        step = len(compounds) / b.max_compound
        compounds = [compounds[int(i * step)] for i in range(b.max_compound)]
    out.extend(compounds)
    return out
