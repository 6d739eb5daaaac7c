"""Elements of MU_* (x) Q written in the Mischenko generators m_1, m_2, ...

A monomial m_1^{e_1} m_2^{e_2} ... is stored as the exponent tuple
``(e_1, e_2, ...)`` with trailing zeros removed, so ``()`` is the unit.
Coefficients are ``gmpy2.mpq``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from gmpy2 import mpq

from .errors import ParseError

Monomial = tuple

_ZERO = mpq(0)


def as_rational(value) -> mpq:
    """Coerce int, Fraction, mpq or a ``"p/q"`` string to ``mpq``."""
    if isinstance(value, str):
        try:
            return mpq(value.strip())
        except ValueError as exc:
            raise ParseError(f"not a rational number: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction or string")
    return mpq(value)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not b:
        return a
    if not a:
        return b
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] += v
    return tuple(out)


def mono_degree(mono: Monomial) -> int:
    """Half-degree of a monomial (m_i has half-degree i)."""
    return sum((i + 1) * e for i, e in enumerate(mono))


def _trim(mono) -> Monomial:
    mono = list(mono)
    while mono and mono[-1] == 0:
        mono.pop()
    return tuple(mono)


def format_monomial_key(mono: Monomial) -> str:
    return "(" + ",".join(str(e) for e in mono) + ")"


def parse_monomial_key(key: str) -> Monomial:
    s = key.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError(f"monomial key must look like '(e1,e2,...)': {key!r}")
    body = s[1:-1].strip()
    if not body:
        return ()
    try:
        exps = [int(part) for part in body.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad monomial key {key!r}") from exc
    if any(e < 0 for e in exps):
        raise ParseError(f"negative exponent in monomial key {key!r}")
    return _trim(exps)


class MuElement:
    """A sparse polynomial in m_1, m_2, ... with rational coefficients.

    Instances are immutable; arithmetic returns new objects.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping | None = None):
        t = {}
        if terms:
            for mono, c in terms.items():
                c = as_rational(c)
                if c:
                    mono = _trim(mono)
                    c = t.get(mono, _ZERO) + c
                    if c:
                        t[mono] = c
                    else:
                        t.pop(mono, None)
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, t: dict) -> "MuElement":
        # ``t`` must already be trimmed with nonzero mpq values.
        obj = cls.__new__(cls)
        obj._t = t
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "MuElement":
        c = as_rational(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def gen(cls, i: int) -> "MuElement":
        """The Mischenko generator m_i (i >= 1)."""
        if i < 1:
            raise ValueError("generators are m_1, m_2, ...")
        return cls._raw({(0,) * (i - 1) + (1,): mpq(1)})

    @classmethod
    def coerce(cls, x) -> "MuElement":
        if isinstance(x, MuElement):
            return x
        return cls.const(x)

    # -- inspection ------------------------------------------------------

    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def degrees(self) -> set[int]:
        return {mono_degree(m) for m in self._t}

    def is_homogeneous(self, k: int | None = None) -> bool:
        degs = self.degrees()
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return k is None or degs == {k}

    def homogeneous_part(self, k: int) -> "MuElement":
        return MuElement._raw({m: c for m, c in self._t.items() if mono_degree(m) == k})

    def max_generator(self) -> int:
        """Largest i such that m_i occurs (0 for constants)."""
        return max((len(m) for m in self._t), default=0)

    def constant(self) -> mpq:
        return self._t.get((), _ZERO)

    def is_constant(self) -> bool:
        return all(not m for m in self._t)

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, MuElement):
            try:
                other = MuElement.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        if not other._t:
            return self
        if not self._t:
            return other
        t = dict(self._t)
        for m, c in other._t.items():
            s = t.get(m, _ZERO) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return MuElement._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return MuElement._raw({m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        if not isinstance(other, MuElement):
            try:
                other = MuElement.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "MuElement":
        c = as_rational(c)
        if not c:
            return MuElement._raw({})
        if c == 1:
            return self
        return MuElement._raw({m: v * c for m, v in self._t.items()})

    def __mul__(self, other):
        if not isinstance(other, MuElement):
            try:
                return self.scale(other)
            except (TypeError, ValueError):
                return NotImplemented
        a, b = self._t, other._t
        if not a or not b:
            return MuElement._raw({})
        if len(a) < len(b):
            a, b = b, a
        t: dict = {}
        get = t.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = mono_mul(ma, mb)
                t[m] = get(m, _ZERO) + ca * cb
        return MuElement._raw({m: c for m, c in t.items() if c})

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined in MU_*")
        out = MuElement.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, MuElement):
            return self._t == other._t
        try:
            return self._t == MuElement.const(other)._t
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # -- rendering -------------------------------------------------------

    def sorted_items(self):
        return sorted(self._t.items(), key=lambda mc: (mono_degree(mc[0]), mc[0]))

    def __str__(self):
        return format_polynomial(self.sorted_items(), _mono_str)

    def __repr__(self):
        return f"MuElement({self})"

    def to_json(self) -> dict:
        return {format_monomial_key(m): str(c) for m, c in self.sorted_items()}

    @classmethod
    def from_json(cls, obj) -> "MuElement":
        """Accepts the dict form, an integer, or a ``"p/q"`` string."""
        if isinstance(obj, MuElement):
            return obj
        if isinstance(obj, dict):
            return cls({parse_monomial_key(k): as_rational(v) for k, v in obj.items()})
        if isinstance(obj, (int, str, Fraction)) and not isinstance(obj, bool):
            return cls.const(obj)
        raise ParseError(f"cannot read an MU_* coefficient from {obj!r}")


def _mono_str(mono: Monomial) -> str:
    parts = []
    for i, e in enumerate(mono):
        if e == 1:
            parts.append(f"m{i + 1}")
        elif e:
            parts.append(f"m{i + 1}^{e}")
    return "*".join(parts)


def format_polynomial(items: Iterable, mono_str) -> str:
    """Render ``[(monomial, coefficient), ...]`` as ``2*m1^2 - m2``."""
    out = []
    for mono, c in items:
        ms = mono_str(mono)
        neg = c < 0
        a = -c if neg else c
        if not ms:
            body = str(a)
        elif a == 1:
            body = ms
        else:
            body = f"{a}*{ms}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out) if out else "0"


ZERO = MuElement._raw({})
ONE = MuElement.const(1)
