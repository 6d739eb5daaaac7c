"""The fixed-point ring MU_*[e_V, e_V^{-1}, Y_{V,d}] for a torus.

``e_V`` has degree -2 and ``Y_{V,d}`` (d >= 2) degree 2d. The geometric cone
is the subring where no Euler class appears with a positive exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .borel import Weight
from .errors import ParseError, PreconditionError
from .mu import ONE, ZERO, MuElement, mono_degree


def _canon_e(items) -> tuple:
    acc: dict = {}
    for w, k in items:
        acc[w] = acc.get(w, 0) + int(k)
    return tuple(sorted((w, k) for w, k in acc.items() if k))


def _canon_y(items) -> tuple:
    acc: dict = {}
    for (w, d), k in items:
        if d < 2:
            raise PreconditionError(f"Y levels start at 2 (use e_V^-1 for level 1), got {d}")
        acc[(w, d)] = acc.get((w, d), 0) + int(k)
    if any(k < 0 for k in acc.values()):
        raise PreconditionError("Y exponents must be nonnegative")
    return tuple(sorted((wd, k) for wd, k in acc.items() if k))


@dataclass(frozen=True, order=True)
class FixedMonomial:
    """prod e_V^{a_V} * prod Y_{V,d}^{b_{V,d}}, stored as sorted tuples."""

    e: tuple = ()
    y: tuple = ()

    @classmethod
    def make(cls, e: Mapping | Iterable = (), y: Mapping | Iterable = ()) -> "FixedMonomial":
        e_items = e.items() if isinstance(e, Mapping) else e
        y_items = y.items() if isinstance(y, Mapping) else y
        return cls(
            _canon_e((Weight.parse(w), k) for w, k in e_items),
            _canon_y(((Weight.parse(w), int(d)), k) for (w, d), k in y_items),
        )

    def weights(self) -> set:
        return {w for w, _ in self.e} | {w for (w, _), _ in self.y}

    @property
    def degree(self) -> int:
        return sum(-2 * k for _, k in self.e) + sum(2 * d * k for (_, d), k in self.y)

    def __mul__(self, other: "FixedMonomial") -> "FixedMonomial":
        return FixedMonomial(_canon_e(self.e + other.e), _canon_y(self.y + other.y))

    def in_cone(self) -> bool:
        return all(k <= 0 for _, k in self.e)

    def is_one(self) -> bool:
        return not self.e and not self.y

    def __str__(self):
        parts = []
        for w, k in self.e:
            parts.append(f"e_{{{w}}}" + (f"^{{{k}}}" if k < 0 else (f"^{k}" if k != 1 else "")))
        for (w, d), k in self.y:
            parts.append(f"Y_{{{w},{d}}}" + (f"^{k}" if k != 1 else ""))
        return "*".join(parts) if parts else "1"

    def to_json(self) -> dict:
        out: dict = {}
        if self.e:
            out["e"] = {str(w): k for w, k in self.e}
        if self.y:
            out["y"] = [[str(w), d] if k == 1 else [str(w), d, k] for (w, d), k in self.y]
        return out


ONE_MONOMIAL = FixedMonomial()


class FixedDatum:
    """A finite MU_*-combination of fixed monomials of a common torus rank."""

    __slots__ = ("rank", "_t")

    def __init__(self, rank: int, terms: Mapping | None = None):
        if rank < 1:
            raise PreconditionError("torus rank must be >= 1")
        self.rank = rank
        t: dict = {}
        for mono, c in (terms or {}).items():
            for w in mono.weights():
                if w.rank != rank:
                    raise PreconditionError(f"weight {w} does not have rank {rank}")
            c = MuElement.coerce(c)
            s = t.get(mono, ZERO) + c
            if s:
                t[mono] = s
            else:
                t.pop(mono, None)
        self._t = t

    @classmethod
    def _raw(cls, rank, t):
        obj = cls.__new__(cls)
        obj.rank = rank
        obj._t = t
        return obj

    # -- constructors ----------------------------------------------------

    @classmethod
    def one(cls, rank: int) -> "FixedDatum":
        return cls._raw(rank, {ONE_MONOMIAL: ONE})

    @classmethod
    def const(cls, c, rank: int) -> "FixedDatum":
        c = MuElement.coerce(c)
        return cls._raw(rank, {ONE_MONOMIAL: c} if c else {})

    @classmethod
    def euler(cls, w, k: int = 1) -> "FixedDatum":
        """e_V^k (k may be negative)."""
        w = Weight.parse(w)
        return cls._raw(w.rank, {FixedMonomial.make({w: k}): ONE})

    @classmethod
    def y_class(cls, w, d: int, k: int = 1) -> "FixedDatum":
        w = Weight.parse(w)
        if d == 1:
            return cls.euler(w, -k)
        return cls._raw(w.rank, {FixedMonomial.make((), {(w, d): k}): ONE})

    # -- inspection ------------------------------------------------------

    def items(self):
        return self._t.items()

    def terms(self) -> dict:
        return dict(self._t)

    def __len__(self):
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def sorted_items(self):
        return sorted(self._t.items(), key=lambda mc: (str(mc[0]) if not mc[0].is_one() else "", mc[0]))

    def weights(self) -> set:
        out = set()
        for m in self._t:
            out |= m.weights()
        return out

    def degrees(self) -> set[int]:
        """Homological degrees of all terms (coefficient m_i counts 2i)."""
        out = set()
        for mono, c in self._t.items():
            for m in c.terms():
                out.add(mono.degree + 2 * mono_degree(m))
        return out

    def degree(self) -> int | None:
        """The common degree, or None if the element is not homogeneous."""
        d = self.degrees()
        return d.pop() if len(d) == 1 else None

    def is_homogeneous(self, n: int | None = None) -> bool:
        d = self.degrees()
        if len(d) > 1:
            return False
        return n is None or not d or d == {n}

    def homogeneous_components(self) -> dict[int, "FixedDatum"]:
        out: dict = {}
        for mono, c in self._t.items():
            for m, v in c.terms().items():
                deg = mono.degree + 2 * mono_degree(m)
                comp = out.setdefault(deg, {})
                comp[mono] = comp.get(mono, ZERO) + MuElement({m: v})
        return {d: FixedDatum(self.rank, t) for d, t in sorted(out.items())}

    def in_cone(self) -> bool:
        return all(m.in_cone() for m in self._t)

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "FixedDatum":
        if isinstance(other, FixedDatum):
            if other.rank != self.rank:
                raise PreconditionError(f"rank mismatch: {self.rank} vs {other.rank}")
            return other
        return FixedDatum.const(MuElement.coerce(other), self.rank)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, PreconditionError):
                raise
            return NotImplemented
        t = dict(self._t)
        for m, c in other._t.items():
            s = t.get(m, ZERO) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return FixedDatum._raw(self.rank, t)

    __radd__ = __add__

    def __neg__(self):
        return FixedDatum._raw(self.rank, {m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, FixedDatum):
            try:
                return self.scale(other)
            except (TypeError, ValueError):
                return NotImplemented
        other = self._coerce(other)
        t: dict = {}
        for ma, ca in self._t.items():
            for mb, cb in other._t.items():
                m = ma * mb
                s = t.get(m, ZERO) + ca * cb
                if s:
                    t[m] = s
                else:
                    t.pop(m, None)
        return FixedDatum._raw(self.rank, t)

    __rmul__ = __mul__

    def scale(self, c) -> "FixedDatum":
        c = MuElement.coerce(c)
        t = {}
        for m, v in self._t.items():
            p = v * c
            if p:
                t[m] = p
        return FixedDatum._raw(self.rank, t)

    def __pow__(self, k: int):
        if k < 0:
            raise PreconditionError("negative powers are only defined for e_V")
        out = FixedDatum.one(self.rank)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, FixedDatum):
            return self.rank == other.rank and self._t == other._t
        try:
            return self == self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.rank, frozenset(self._t.items())))

    # -- rendering -------------------------------------------------------

    def to_str(self, coef_str=str) -> str:
        parts = []
        for mono, c in self.sorted_items():
            cs = coef_str(c)
            if mono.is_one():
                body = cs
            elif cs == "1":
                body = str(mono)
            elif cs == "-1":
                body = "-" + str(mono)
            elif " " not in cs.lstrip("-"):
                body = f"{cs}*{mono}"
            else:
                body = f"({cs})*{mono}"
            parts.append(body)
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"FixedDatum({self})"

    def to_json(self) -> dict:
        terms = []
        for mono, c in self.sorted_items():
            entry = {"coef": c.to_json()}
            entry.update(mono.to_json())
            terms.append(entry)
        return {"rank": self.rank, "terms": terms}

    @classmethod
    def from_json(cls, obj, rank: int | None = None) -> "FixedDatum":
        """Read ``{"rank", "terms": [...]}`` or a bare single term ``{"coef"?, "e"?, "y"?}``."""
        if not isinstance(obj, dict):
            raise ParseError(f"a fixed-point datum is a JSON object, got {type(obj).__name__}")
        if "terms" in obj:
            raw_terms = obj["terms"]
            if not isinstance(raw_terms, list):
                raise ParseError("'terms' must be a list")
            rank = obj.get("rank", rank)
        else:
            raw_terms = [obj]
        parsed = []
        for i, term in enumerate(raw_terms):
            if not isinstance(term, dict):
                raise ParseError(f"term {i} is not an object")
            unknown = set(term) - {"coef", "e", "y"}
            if unknown:
                raise ParseError(f"term {i} has unknown keys {sorted(unknown)}")
            coef = MuElement.from_json(term.get("coef", 1))
            e = term.get("e", {})
            if not isinstance(e, dict):
                raise ParseError(f"term {i}: 'e' must map weights to exponents")
            e_items = []
            for w, k in e.items():
                if not isinstance(k, int) or isinstance(k, bool):
                    raise ParseError(f"term {i}: exponent of e_{w} must be an integer")
                e_items.append((Weight.parse(w), k))
            y_items = []
            for entry in term.get("y", []):
                if not isinstance(entry, list) or len(entry) not in (2, 3):
                    raise ParseError(f"term {i}: y entries look like [weight, level] or [weight, level, power]")
                w, d = Weight.parse(entry[0]), entry[1]
                k = entry[2] if len(entry) == 3 else 1
                if not isinstance(d, int) or not isinstance(k, int):
                    raise ParseError(f"term {i}: level and power must be integers")
                if d < 2:
                    raise ParseError(f"term {i}: Y levels start at 2; write e_V^-1 instead of level {d}")
                y_items.append(((w, d), k))
            parsed.append((FixedMonomial.make(e_items, y_items), coef))
        ranks = {w.rank for m, _ in parsed for w in m.weights()}
        if rank is None:
            if len(ranks) > 1:
                raise ParseError(f"weights of different ranks {sorted(ranks)}")
            rank = ranks.pop() if ranks else 1
        out = FixedDatum(int(rank))
        for m, c in parsed:
            out = out + FixedDatum(int(rank), {m: c})
        return out


def in_cone(x: FixedDatum) -> bool:
    """Membership in MU_*[e_V^{-1}, Y_{V,d}]: no positive Euler exponent."""
    return x.in_cone()


def _compositions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _antipode_y(w: Weight, d: int) -> FixedDatum:
    # beta_k := e_V Y_{V,k+1}; iota acts on the betas by the Hopf antipode
    out = FixedDatum(w.rank)
    for comp in _compositions(d - 1):
        m = len(comp)
        y: dict = {}
        for k in comp:
            y[(w, k + 1)] = y.get((w, k + 1), 0) + 1
        mono = FixedMonomial.make({w: m - 1}, y)
        out = out + FixedDatum(w.rank, {mono: MuElement.const((-1) ** m)})
    return out


def antipode(x: FixedDatum) -> FixedDatum:
    """The involution: fixes every e_V^{+-1}, sends Y_{V,d} to the antipode image."""
    out = FixedDatum(x.rank)
    for mono, c in x.items():
        term = FixedDatum._raw(x.rank, {FixedMonomial(mono.e, ()): c})
        for (w, d), k in mono.y:
            img = _antipode_y(w, d)
            for _ in range(k):
                term = term * img
        out = out + term
    return out
