"""Truncated multivariate power series over MU_* (x) Q.

A series carries ``prec``: every coefficient of total degree <= prec is
exact and nothing beyond it is known. Products use the valuation-aware
rule ``prec(ab) = min(prec(a) + val(b), prec(b) + val(a))`` so the
reported precision is always justified by the inputs.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from gmpy2 import mpq

from .errors import PreconditionError
from .mu import ONE, ZERO, MuElement, format_monomial_key, mono_degree, mono_mul, parse_monomial_key

_Z = mpq(0)

# Stand-in for "exact to every degree" (polynomials such as the logarithm).
INFINITE_PREC = 10**9


def _exp_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


class PowerSeries:
    """Sum of c_alpha C^alpha over exponent vectors alpha with |alpha| <= prec."""

    __slots__ = ("nvars", "prec", "_t")

    def __init__(self, nvars: int, prec: int, terms: Mapping | None = None):
        if nvars < 1:
            raise PreconditionError("a power series needs at least one variable")
        if prec < -1:
            raise PreconditionError("precision below -1 is meaningless")
        self.nvars = nvars
        self.prec = prec
        t = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != nvars or any(e < 0 for e in exp):
                    raise PreconditionError(f"bad exponent vector {exp} for {nvars} variables")
                if sum(exp) > prec:
                    continue
                c = MuElement.coerce(c)
                if c:
                    c = t.get(exp, ZERO) + c
                    if c:
                        t[exp] = c
                    else:
                        t.pop(exp, None)
        self._t = t

    @classmethod
    def _raw(cls, nvars, prec, t):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.prec = prec
        obj._t = t
        return obj

    def _new(self, nvars, prec, t):
        return type(self)._raw(nvars, prec, t)

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, nvars, prec):
        return cls._raw(nvars, prec, {})

    @classmethod
    def const(cls, c, nvars, prec):
        c = MuElement.coerce(c)
        return cls._raw(nvars, prec, {(0,) * nvars: c} if c and prec >= 0 else {})

    @classmethod
    def one(cls, nvars, prec):
        return cls.const(ONE, nvars, prec)

    @classmethod
    def var(cls, i, nvars, prec):
        """The i-th coordinate (0-based)."""
        exp = [0] * nvars
        exp[i] = 1
        return cls._raw(nvars, prec, {tuple(exp): ONE} if prec >= 1 else {})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, prec: int | None = None):
        """Univariate series sum coeffs[k] x^k."""
        if prec is None:
            prec = len(coeffs) - 1
        t = {}
        for k, c in enumerate(coeffs[: prec + 1]):
            c = MuElement.coerce(c)
            if c:
                t[(k,)] = c
        return cls._raw(1, prec, t)

    # -- inspection ------------------------------------------------------

    def __getitem__(self, exp) -> MuElement:
        if isinstance(exp, int):
            exp = (exp,)
        exp = tuple(exp)
        if sum(exp) > self.prec:
            raise IndexError(f"coefficient of degree {sum(exp)} is beyond precision {self.prec}")
        return self._t.get(exp, ZERO)

    def coeffs(self) -> list[MuElement]:
        """Univariate coefficient list c_0..c_prec."""
        if self.nvars != 1:
            raise PreconditionError("coeffs() is for univariate series")
        return [self._t.get((k,), ZERO) for k in range(self.prec + 1)]

    def items(self):
        return self._t.items()

    def sorted_items(self):
        return sorted(self._t.items(), key=lambda ec: (sum(ec[0]), tuple(-e for e in ec[0])))

    def is_zero(self) -> bool:
        return not self._t

    def valuation(self) -> int:
        """Least total degree of a nonzero term; prec + 1 for the zero series."""
        if not self._t:
            return self.prec + 1
        return min(sum(e) for e in self._t)

    def constant_term(self) -> MuElement:
        return self._t.get((0,) * self.nvars, ZERO)

    def homogeneous_part(self, k: int) -> dict:
        return {e: c for e, c in self._t.items() if sum(e) == k}

    def homological_degrees(self) -> set[int]:
        """Degrees 2*deg(coefficient) - 2*|alpha| of all terms."""
        out = set()
        for e, c in self._t.items():
            t = sum(e)
            for m in c.terms():
                out.add(2 * mono_degree(m) - 2 * t)
        return out

    def is_graded_homogeneous(self, degree: int | None = None) -> bool:
        degs = self.homological_degrees()
        if len(degs) > 1:
            return False
        return degree is None or not degs or degs == {degree}

    def truncate(self, prec: int):
        if prec >= self.prec:
            return self
        return self._new(self.nvars, prec, {e: c for e, c in self._t.items() if sum(e) <= prec})

    def agrees(self, other: "PowerSeries", upto: int | None = None) -> bool:
        """Coefficientwise equality through degree ``upto`` (default: common precision)."""
        if upto is None:
            upto = min(self.prec, other.prec)
        if upto > self.prec or upto > other.prec:
            return False
        keys = {e for e in self._t if sum(e) <= upto} | {e for e in other._t if sum(e) <= upto}
        return all(self._t.get(e, ZERO) == other._t.get(e, ZERO) for e in keys)

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.nvars == other.nvars and self.prec == other.prec and self._t == other._t

    def __hash__(self):
        return hash((self.nvars, self.prec, frozenset(self._t.items())))

    # -- arithmetic ------------------------------------------------------

    def _check(self, other):
        if self.nvars != other.nvars:
            raise PreconditionError(f"rank mismatch: {self.nvars} vs {other.nvars} variables")

    def _coerce(self, other):
        if isinstance(other, PowerSeries):
            self._check(other)
            return other
        return self.const(MuElement.coerce(other), self.nvars, INFINITE_PREC)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        prec = min(self.prec, other.prec)
        t = {e: c for e, c in self._t.items() if sum(e) <= prec}
        for e, c in other._t.items():
            if sum(e) > prec:
                continue
            s = t.get(e, ZERO) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return self._new(self.nvars, prec, t)

    __radd__ = __add__

    def __neg__(self):
        return self._new(self.nvars, self.prec, {e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = MuElement.coerce(c)
        if not c:
            return self._new(self.nvars, self.prec, {})
        t = {}
        for e, v in self._t.items():
            p = v * c
            if p:
                t[e] = p
        return self._new(self.nvars, self.prec, t)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            try:
                return self.scale(other)
            except (TypeError, ValueError):
                return NotImplemented
        self._check(other)
        va, vb = self.valuation(), other.valuation()
        prec = min(self.prec + vb, other.prec + va)
        return self._new(self.nvars, prec, _mul_terms(self._t, other._t, prec))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int):
        if k < 0:
            raise PreconditionError("use inverse() for negative powers")
        out = self.one(self.nvars, INFINITE_PREC)
        for _ in range(k):
            out = out * self
        if k == 0:
            out = out.truncate(self.prec)
        return out

    def powers(self, kmax: int) -> list:
        """[self^0, self^1, ..., self^kmax]."""
        out = [self.one(self.nvars, INFINITE_PREC)]
        for _ in range(kmax):
            out.append(out[-1] * self)
        return out

    def inverse(self):
        """Multiplicative inverse; the constant term must be a nonzero rational."""
        c0 = self.constant_term()
        if not c0 or not c0.is_constant():
            raise PreconditionError("only series with a nonzero rational constant term are units")
        if self.prec >= INFINITE_PREC // 2:
            raise PreconditionError("truncate before inverting an exact series")
        inv0 = 1 / c0.constant()
        # 1/(c0 (1 + r)) = inv0 * sum (-r)^k with val(r) >= 1
        r = (self - c0).scale(inv0)
        out = self.one(self.nvars, self.prec)
        term = out
        for _ in range(self.prec):
            term = -(term * r).truncate(self.prec)
            if term.is_zero():
                break
            out = out + term
        return out.scale(inv0)

    def mul_monomial(self, exp):
        """Multiply by C^exp; precision rises by |exp|."""
        exp = tuple(exp)
        d = sum(exp)
        return self._new(self.nvars, self.prec + d, {_exp_add(e, exp): c for e, c in self._t.items()})

    def div_monomial(self, exp):
        """Exact division by C^exp. Terms not divisible raise PreconditionError."""
        exp = tuple(exp)
        d = sum(exp)
        t = {}
        for e, c in self._t.items():
            q = tuple(a - b for a, b in zip(e, exp))
            if any(x < 0 for x in q):
                raise PreconditionError(f"term C^{e} is not divisible by C^{exp}")
            t[q] = c
        return self._new(self.nvars, self.prec - d, t)

    def derivative(self, i: int = 0):
        """Partial derivative in variable i; precision drops by one."""
        t = {}
        for e, c in self._t.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                t[tuple(ne)] = c.scale(e[i])
        return self._new(self.nvars, self.prec - 1, t)

    def substitute(self, coeffs: Sequence, f_prec: int | None = None):
        """Evaluate the univariate series sum coeffs[k] y^k at y = self.

        ``self`` must have zero constant term. ``f_prec`` is the precision
        of the outer series (defaults to exact).
        """
        if self.constant_term():
            raise PreconditionError("substitution needs a zero constant term")
        v = self.valuation()
        if f_prec is None:
            f_prec = INFINITE_PREC
        if v > self.prec:
            prec = self.prec
        else:
            prec = min(self.prec, (f_prec + 1) * v - 1)
        n = min(len(coeffs) - 1, f_prec, prec // max(v, 1) if v <= self.prec else 0)
        acc = self.const(coeffs[0] if coeffs else ZERO, self.nvars, prec)
        power = self.one(self.nvars, INFINITE_PREC)
        for k in range(1, n + 1):
            power = (power * self).truncate(prec)
            ck = MuElement.coerce(coeffs[k])
            if ck:
                acc = acc + power.scale(ck)
        return acc.truncate(prec)

    # -- rendering / serialization --------------------------------------

    def to_str(self, coef_str=str, names=None) -> str:
        if names is None:
            names = ["x"] if self.nvars == 1 else [f"C{i + 1}" for i in range(self.nvars)]
        return format_series(self.sorted_items(), names, self.prec, coef_str)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    def to_json(self) -> dict:
        return {
            "rank": self.nvars,
            "prec": self.prec,
            "terms": {format_monomial_key(e): c.to_json() for e, c in self.sorted_items()},
        }

    @classmethod
    def from_json(cls, obj: dict):
        nvars = int(obj["rank"])
        prec = int(obj["prec"])
        terms = {}
        for k, v in obj.get("terms", {}).items():
            e = parse_monomial_key(k)
            e = e + (0,) * (nvars - len(e))
            terms[e] = MuElement.from_json(v)
        return cls(nvars, prec, terms)


def _mul_terms(a: dict, b: dict, prec: int) -> dict:
    # Raw product of two term dicts, keeping total degree <= prec.
    if not a or not b:
        return {}
    acc: dict = {}
    bl = [(e, sum(e), c._t) for e, c in b.items()]
    for ea, ca in a.items():
        da = sum(ea)
        if da > prec:
            continue
        ta = ca._t
        for eb, db, tb in bl:
            if da + db > prec:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            slot = acc.get(e)
            if slot is None:
                slot = acc[e] = {}
            get = slot.get
            for mb, xb in tb.items():
                for ma, xa in ta.items():
                    m = mono_mul(ma, mb)
                    slot[m] = get(m, _Z) + xa * xb
    out = {}
    for e, slot in acc.items():
        t = {m: c for m, c in slot.items() if c}
        if t:
            out[e] = MuElement._raw(t)
    return out


def format_series(items, names, prec, coef_str=str) -> str:
    parts = []
    for e, c in items:
        mono = "*".join(
            (n if k == 1 else f"{n}^{k}") for n, k in zip(names, e) if k
        )
        cs = coef_str(c)
        if not mono:
            parts.append(cs)
        elif cs == "1":
            parts.append(mono)
        elif cs == "-1":
            parts.append("-" + mono)
        elif " " not in cs.lstrip("-"):
            parts.append(f"{cs}*{mono}")
        else:
            parts.append(f"({cs})*{mono}")
    body = " + ".join(parts) if parts else "0"
    body = body.replace("+ -", "- ")
    if prec >= INFINITE_PREC // 2:
        return body
    return f"{body} + O(deg {prec + 1})"
