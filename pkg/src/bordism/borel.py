"""Borel cobordism of a torus: MU^*[[C_1..C_r]], Euler classes, localization.

A ``LocalizedBorel`` is a fraction whose denominator is a product of Euler
classes of nontrivial characters. Its effective precision is the numerator
truncation minus the total pole order; division back into the power series
ring is an exact degreewise linear solve that either returns the quotient
or a witness for the first obstruction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import ParseError, PrecisionError, PreconditionError
from .lazard import RingContext, cp_class, is_integral, monomials_of_degree
from .mu import ONE, ZERO, MuElement, mono_degree, mono_mul
from .series import INFINITE_PREC, PowerSeries

_WEIGHT_RE = re.compile(r"^\(\s*-?\d+(\s*,\s*-?\d+)*\s*,?\s*\)$")


@dataclass(frozen=True, order=True)
class Weight:
    """A nonzero character mu of (S^1)^r."""

    mu: tuple

    def __post_init__(self):
        mu = tuple(int(x) for x in self.mu)
        object.__setattr__(self, "mu", mu)
        if not mu:
            raise PreconditionError("a weight needs rank >= 1")
        if not any(mu):
            raise PreconditionError("the zero weight is the trivial character; e(V) = 0 is excluded")

    @property
    def rank(self) -> int:
        return len(self.mu)

    def dual(self) -> "Weight":
        return Weight(tuple(-x for x in self.mu))

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a + b for a, b in zip(self.mu, other.mu)))

    def axis(self):
        """(i, a) if the weight is a * (i-th coordinate), else None."""
        nz = [(i, a) for i, a in enumerate(self.mu) if a]
        return nz[0] if len(nz) == 1 else None

    def __str__(self):
        return "(" + ",".join(str(x) for x in self.mu) + ")"

    def __repr__(self):
        return f"Weight{self}"

    @classmethod
    def parse(cls, obj) -> "Weight":
        """From ``"(1,-2)"``, a list of ints, or a Weight."""
        if isinstance(obj, Weight):
            return obj
        if isinstance(obj, str):
            if not _WEIGHT_RE.match(obj.strip()):
                raise ParseError(f"weights look like '(1,-2)': {obj!r}")
            body = obj.strip()[1:-1]
            return cls(tuple(int(p) for p in body.split(",") if p.strip()))
        if isinstance(obj, (list, tuple)) and all(isinstance(x, int) for x in obj):
            return cls(tuple(obj))
        raise ParseError(f"cannot read a weight from {obj!r}")


def unit_weight(i: int, r: int) -> Weight:
    return Weight(tuple(1 if k == i else 0 for k in range(r)))


class BorelSeries(PowerSeries):
    """Element of MU^*[[C_1..C_r]] truncated at total C-degree ``prec``."""

    @property
    def rank(self) -> int:
        return self.nvars

    def check_degree(self, degree: int) -> "BorelSeries":
        if not self.is_graded_homogeneous(degree):
            raise AssertionError(f"expected homological degree {degree}, got {sorted(self.homological_degrees())}")
        return self

    def to_str(self, coef_str=str, names=None) -> str:
        return super().to_str(coef_str, names or [f"C{i + 1}" for i in range(self.nvars)])


# ---------------------------------------------------------------------------
# Euler classes


@lru_cache(maxsize=4096)
def euler_class(ctx: RingContext, w: Weight, D: int) -> BorelSeries:
    """e(V) = [mu_1]_F C_1 +_F ... +_F [mu_r]_F C_r through C-degree D.

    Computed as exp(sum mu_i log C_i), which is the same series.
    """
    if not isinstance(w, Weight):
        w = Weight.parse(w)
    r = w.rank
    logc = ctx.log_coeffs()
    z = {}
    for i, a in enumerate(w.mu):
        if not a:
            continue
        for k, c in enumerate(logc):
            if c and k <= D:
                e = [0] * r
                e[i] = k
                z[tuple(e)] = c.scale(a)
    zs = BorelSeries(r, D, z)
    out = zs.substitute(ctx.exp_coeffs(max(D, 1)))
    return BorelSeries._raw(r, out.prec, out._t)


@lru_cache(maxsize=4096)
def _axis_unit_inverse(ctx: RingContext, w: Weight, D: int, k: int) -> BorelSeries:
    # e(w) = C_i * u with u(0) = a; returns u^{-k} through degree D
    i, _ = w.axis()
    exp = [0] * w.rank
    exp[i] = 1
    u = euler_class(ctx, w, D + 1).div_monomial(exp)
    inv = u.inverse()
    out = BorelSeries.one(w.rank, D)
    for _ in range(k):
        out = (out * inv).truncate(D)
    return BorelSeries._raw(w.rank, out.prec, out._t)


def euler_product(ctx: RingContext, den: Mapping, prec: int, r: int) -> BorelSeries:
    """prod e(w)^k through C-degree prec."""
    out = BorelSeries.one(r, INFINITE_PREC)
    for w, k in sorted(den.items()):
        ax = w.axis()
        if ax is not None and ax[1] == 1:
            exp = [0] * r
            exp[ax[0]] = k
            out = out.mul_monomial(exp)
            continue
        e = euler_class(ctx, w, prec)
        for _ in range(k):
            out = out * e
    return _as_borel(out.truncate(prec))


def _as_borel(s: PowerSeries) -> BorelSeries:
    if isinstance(s, BorelSeries):
        return s
    return BorelSeries._raw(s.nvars, s.prec, s._t)


# ---------------------------------------------------------------------------
# localized elements


def _den_dict(den) -> dict:
    out: dict = {}
    items = den.items() if isinstance(den, Mapping) else den
    for w, k in items:
        w = Weight.parse(w)
        k = int(k)
        if k < 0:
            raise PreconditionError("denominator exponents must be nonnegative")
        if k:
            out[w] = out.get(w, 0) + k
    return out


class LocalizedBorel:
    """numerator / prod e(w)^k, with Euler classes of nonzero weights only."""

    __slots__ = ("ctx", "num", "den")

    def __init__(self, ctx: RingContext, num: PowerSeries, den=()):
        self.ctx = ctx
        self.num = _as_borel(num)
        self.den = tuple(sorted(_den_dict(den).items()))
        for w, _ in self.den:
            if w.rank != self.num.nvars:
                raise PreconditionError(f"weight {w} has rank {w.rank}, series has rank {self.num.nvars}")

    @property
    def rank(self) -> int:
        return self.num.nvars

    @property
    def pole_order(self) -> int:
        return sum(k for _, k in self.den)

    @property
    def precision(self) -> int:
        """Effective precision: numerator truncation minus pole order."""
        return self.num.prec - self.pole_order

    def valuation(self) -> int:
        return self.num.valuation() - self.pole_order

    def den_map(self) -> dict:
        return dict(self.den)

    @classmethod
    def from_series(cls, ctx, s: PowerSeries) -> "LocalizedBorel":
        return cls(ctx, s, ())

    def _coerce(self, other):
        if isinstance(other, LocalizedBorel):
            if other.rank != self.rank:
                raise PreconditionError("rank mismatch")
            return other
        if isinstance(other, PowerSeries):
            return LocalizedBorel(self.ctx, other)
        c = MuElement.coerce(other)
        return LocalizedBorel(self.ctx, BorelSeries.const(c, self.rank, INFINITE_PREC))

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        if other.num.is_zero() and other.precision >= self.precision:
            return self
        if self.num.is_zero() and self.precision >= other.precision:
            return other
        a, b = self.den_map(), other.den_map()
        common = {w: max(a.get(w, 0), b.get(w, 0)) for w in set(a) | set(b)}
        eff = min(self.precision, other.precision)
        target = eff + sum(common.values()) if eff < INFINITE_PREC // 2 else None
        na = _raise_den(self, common, target)
        nb = _raise_den(other, common, target)
        return LocalizedBorel(self.ctx, na + nb, common)

    __radd__ = __add__

    def __neg__(self):
        return LocalizedBorel(self.ctx, -self.num, self.den)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        den = self.den_map()
        for w, k in other.den:
            den[w] = den.get(w, 0) + k
        return LocalizedBorel(self.ctx, self.num * other.num, den)

    __rmul__ = __mul__

    def scale(self, c) -> "LocalizedBorel":
        return LocalizedBorel(self.ctx, self.num.scale(c), self.den)

    def truncate(self, precision: int) -> "LocalizedBorel":
        """Drop numerator terms so the effective precision is at most ``precision``."""
        return LocalizedBorel(self.ctx, self.num.truncate(precision + self.pole_order), self.den)

    def to_str(self, coef_str=str) -> str:
        num = self.num.to_str(coef_str)
        if not self.den:
            return num
        den = " * ".join(f"e{w}" + (f"^{k}" if k != 1 else "") for w, k in self.den)
        return f"[{num}] / [{den}]"

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"LocalizedBorel({self})"

    def to_json(self) -> dict:
        return {
            "num": self.num.to_json(),
            "den": [[str(w), k] for w, k in self.den],
            "precision": self.precision,
        }

    @classmethod
    def from_json(cls, ctx, obj: dict) -> "LocalizedBorel":
        num = BorelSeries.from_json(obj["num"])
        den = [(Weight.parse(w), int(k)) for w, k in obj.get("den", [])]
        return cls(ctx, num, den)


def _raise_den(x: LocalizedBorel, target: Mapping, prec: int | None) -> BorelSeries:
    # numerator of x rewritten over the larger denominator ``target``,
    # kept through C-degree ``prec`` (None: exact, axis weights only)
    have = x.den_map()
    extra = {w: target[w] - have.get(w, 0) for w in target if target[w] - have.get(w, 0) > 0}
    num = x.num if prec is None else x.num.truncate(prec)
    if not extra:
        return num
    if prec is None:
        if any(w.axis() is None or w.axis()[1] != 1 for w in extra):
            raise PrecisionError("exact fractions over non-coordinate Euler classes cannot be added; truncate first")
        prec = INFINITE_PREC
    factor = euler_product(x.ctx, extra, prec, x.rank)
    return _as_borel((num * factor).truncate(prec))


def loc_divide(ctx: RingContext, n: PowerSeries, den) -> LocalizedBorel:
    """n / prod e(w)^k, normalized.

    Euler classes of characters a*rho_i that live on one coordinate are
    rewritten as C_i times a unit, and the unit is absorbed into the
    numerator; the denominator then only mentions e(rho_i) = C_i for those.
    """
    n = _as_borel(n)
    dd = _den_dict(den)
    r = n.nvars
    out: dict = {}
    num = n
    for w, k in sorted(dd.items()):
        if w.rank != r:
            raise PreconditionError(f"weight {w} does not match rank {r}")
        ax = w.axis()
        if ax is not None and ax[1] != 1:
            base = unit_weight(ax[0], r)
            prec = num.prec if num.prec < INFINITE_PREC // 2 else None
            if prec is None:
                raise PrecisionError("numerator must be truncated before localizing")
            num = _as_borel(num * _axis_unit_inverse(ctx, w, prec, k))
            out[base] = out.get(base, 0) + k
        else:
            out[w] = out.get(w, 0) + k
    return LocalizedBorel(ctx, num, out)


def loc_inverse_euler(ctx: RingContext, w: Weight, k: int, precision: int, r: int | None = None) -> LocalizedBorel:
    """1 / e(w)^k with effective precision ``precision``."""
    w = Weight.parse(w)
    one = BorelSeries.one(w.rank, precision + k)
    return loc_divide(ctx, one, {w: k})


# ---------------------------------------------------------------------------
# division back into the power series ring


@dataclass(frozen=True)
class Witness:
    """Where integralization fails.

    ``kind`` is ``"pole"`` when the numerator is not divisible by the
    denominator (``c_degree`` is the numerator C-degree of the first
    nonzero residual) and ``"lattice"`` when the quotient exists rationally
    but a coefficient is not integral (``c_degree`` is the quotient degree).
    """

    kind: str
    c_degree: int
    monomial: tuple | None
    value: MuElement
    pole_order: int

    @property
    def laurent_degree(self) -> int:
        return self.c_degree - self.pole_order if self.kind == "pole" else self.c_degree

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "c_degree": self.c_degree,
            "laurent_degree": self.laurent_degree,
            "monomial": list(self.monomial) if self.monomial is not None else None,
            "value": self.value.to_json(),
        }


@dataclass(frozen=True)
class Integralization:
    ok: bool
    series: BorelSeries | None
    witness: Witness | None
    precision: int
    rational_ok: bool = True

    def to_json(self) -> dict:
        out = {"status": "pass" if self.ok else "fail", "precision": self.precision}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def try_integralize(ctx: RingContext, x: LocalizedBorel) -> Integralization:
    """Find g in MU^*[[C]] with num = g * prod e(w)^k through the effective precision."""
    prec = x.precision
    if prec < 0:
        raise PrecisionError(
            f"effective precision {prec} < 0: numerator known to degree {x.num.prec}, pole order {x.pole_order}",
            needed=x.pole_order,
        )
    g, witness = _divide(ctx, x)
    if witness is not None:
        return Integralization(False, None, witness, prec, rational_ok=False)
    for e, c in g.sorted_items():
        if not is_integral(ctx, c):
            w = Witness("lattice", sum(e), e, c, x.pole_order)
            return Integralization(False, g, w, prec)
    return Integralization(True, g, None, prec)


def _divide(ctx, x: LocalizedBorel):
    r = x.rank
    num = x.num
    prec = x.precision
    den = x.den_map()
    if not den:
        return num, None
    mono_part = {}
    general = {}
    for w, k in den.items():
        ax = w.axis()
        if ax is not None and ax[1] == 1:
            mono_part[ax[0]] = mono_part.get(ax[0], 0) + k
        else:
            general[w] = k
    shift = tuple(mono_part.get(i, 0) for i in range(r))
    if not general:
        bad = [
            (sum(e), e, c)
            for e, c in num.items()
            if sum(e) <= num.prec and any(a < b for a, b in zip(e, shift))
        ]
        if bad:
            bad.sort(key=lambda t: (t[0], tuple(-a for a in t[1])))
            d, e, c = bad[0]
            return None, Witness("pole", d, e, c, x.pole_order)
        g = num.div_monomial(shift)
        return _as_borel(g.truncate(prec)), None
    E = euler_product(ctx, den, num.prec, r)
    return _degreewise_solve(num, E, x.pole_order, prec)


def _homogeneous_monomials(r: int, d: int) -> list[tuple]:
    if r == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in _homogeneous_monomials(r - 1, d - first):
            out.append((first,) + rest)
    return out


def _degreewise_solve(num: BorelSeries, E: BorelSeries, order: int, prec: int):
    r = num.nvars
    by_deg: dict[int, dict] = {}
    for e, c in E.items():
        by_deg.setdefault(sum(e), {})[e] = c
    low = by_deg.get(order, {})
    if not low or any(not c.is_constant() for c in low.values()):
        raise AssertionError("leading form of a product of Euler classes must be a nonzero integer form")
    low_q = {e: c.constant() for e, c in low.items()}
    g: dict[int, dict] = {}
    for j in range(0, num.prec + 1):
        rhs = {e: c for e, c in num.items() if sum(e) == j}
        # subtract contributions of already-solved parts against higher forms of E
        for s, gs in g.items():
            Ej = by_deg.get(j - s)
            if not Ej or j - s == order:
                continue
            for eg, cg in gs.items():
                for ee, ce in Ej.items():
                    t = tuple(a + b for a, b in zip(eg, ee))
                    v = rhs.get(t, ZERO) - cg * ce
                    if v:
                        rhs[t] = v
                    else:
                        rhs.pop(t, None)
        if j < order:
            if rhs:
                e, c = sorted(rhs.items(), key=lambda ec: tuple(-a for a in ec[0]))[0]
                return None, Witness("pole", j, e, c, order)
            continue
        t = j - order
        sol, residual = _solve_form(low_q, r, t, rhs)
        if residual is not None:
            e, c = residual
            return None, Witness("pole", j, e, c, order)
        g[t] = sol
    terms = {e: c for gs in g.values() for e, c in gs.items() if sum(e) <= prec}
    return BorelSeries(r, prec, terms), None


@lru_cache(maxsize=1024)
def _left_inverse(low_items: tuple, r: int, t: int):
    # Row-reduce the multiplication-by-form matrix once per (form, degree).
    low = dict(low_items)
    unknowns = _homogeneous_monomials(r, t)
    d = sum(next(iter(low)))
    eqs = _homogeneous_monomials(r, t + d)
    eq_index = {e: i for i, e in enumerate(eqs)}
    n_eq, n_un = len(eqs), len(unknowns)
    rows = []
    for i in range(n_eq):
        rows.append([mpq(0)] * n_un + [mpq(1) if k == i else mpq(0) for k in range(n_eq)])
    for col, u in enumerate(unknowns):
        for e, c in low.items():
            tgt = tuple(a + b for a, b in zip(u, e))
            rows[eq_index[tgt]][col] += c
    pivot_row = 0
    pivots = []
    for col in range(n_un):
        p = next((i for i in range(pivot_row, n_eq) if rows[i][col]), None)
        if p is None:
            raise AssertionError("multiplication by a nonzero form must be injective")
        rows[pivot_row], rows[p] = rows[p], rows[pivot_row]
        pv = rows[pivot_row][col]
        rows[pivot_row] = [a / pv for a in rows[pivot_row]]
        for i in range(n_eq):
            if i != pivot_row and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[pivot_row])]
        pivots.append(pivot_row)
        pivot_row += 1
    solve = [[(eqs[k], v) for k, v in enumerate(rows[i][n_un:]) if v] for i in range(n_un)]
    check = [[(eqs[k], v) for k, v in enumerate(rows[i][n_un:]) if v] for i in range(n_un, n_eq)]
    return tuple(unknowns), solve, check, tuple(eqs)


def _combine(combo, rhs) -> MuElement:
    acc = ZERO
    for e, v in combo:
        c = rhs.get(e)
        if c:
            acc = acc + c.scale(v)
    return acc


def _solve_form(low_q: dict, r: int, t: int, rhs: dict):
    unknowns, solve, check, eqs = _left_inverse(tuple(sorted(low_q.items())), r, t)
    for combo in check:
        res = _combine(combo, rhs)
        if res:
            lead = sorted(rhs.items(), key=lambda ec: tuple(-a for a in ec[0]))
            mono = lead[0][0] if lead else eqs[0]
            return None, (mono, res)
    sol = {}
    for u, combo in zip(unknowns, solve):
        c = _combine(combo, rhs)
        if c:
            sol[u] = c
    return sol, None


def recheck_witness(ctx: RingContext, x: LocalizedBorel, witness: Witness) -> bool:
    """Independent confirmation that ``witness`` obstructs ``x``.

    Lattice witnesses are confirmed by multiplying the claimed quotient back
    and testing the offending coefficient again. Pole witnesses are confirmed
    by one dense linear system over Q for the whole truncated problem,
    without the degreewise elimination used by ``try_integralize``.
    """
    if witness.kind == "lattice":
        res = try_integralize(ctx, x)
        if res.series is None:
            return False
        coeff = res.series[witness.monomial]
        back = _as_borel(res.series * euler_product(ctx, x.den_map(), x.num.prec, x.rank))
        return (
            coeff == witness.value
            and not is_integral(ctx, coeff)
            and back.agrees(x.num, x.num.prec)
        )
    return not dense_divisible(ctx, x, witness.c_degree)


def dense_divisible(ctx: RingContext, x: LocalizedBorel, upto: int) -> bool:
    """Is num == g * prod e(w)^k modulo C-degree > upto for some g over Q?

    Homological degree is preserved by multiplication with Euler classes, so
    the MU_*-degree of each unknown coefficient of g is fixed by its
    C-degree; that makes the unknowns a finite set.
    """
    r = x.rank
    order = x.pole_order
    E = euler_product(ctx, x.den_map(), upto, r)
    nmax = ctx.N
    for e, c in x.num.items():
        nmax = max(nmax, c.max_generator())
    by_h: dict = {}
    for e, c in x.num.items():
        if sum(e) > upto:
            continue
        for m, v in c.items():
            h = mono_degree(m) - sum(e)
            by_h.setdefault(h, {})[(e, m)] = v
    e_terms = [(e, list(c.items())) for e, c in E.items() if sum(e) <= upto]
    for h, rhs in by_h.items():
        cols = []
        for s in range(0, upto - order + 1):
            k = h + order + s
            if k < 0:
                continue
            for gamma in _homogeneous_monomials(r, s):
                for m in monomials_of_degree(k, nmax):
                    cols.append((gamma, _trim(m)))
        rows: dict = {}
        for ci, (gamma, m) in enumerate(cols):
            for ee, et in e_terms:
                tgt = tuple(a + b for a, b in zip(gamma, ee))
                if sum(tgt) > upto:
                    continue
                for em, ec in et:
                    key = (tgt, mono_mul(m, em))
                    row = rows.setdefault(key, {})
                    row[ci] = row.get(ci, mpq(0)) + ec
        keys = sorted(set(rows) | set(rhs))
        if not _sparse_consistent([rows.get(k, {}) for k in keys], [rhs.get(k, mpq(0)) for k in keys]):
            return False
    return True


def _trim(m: tuple) -> tuple:
    m = list(m)
    while m and m[-1] == 0:
        m.pop()
    return tuple(m)


def _sparse_consistent(mat: list, b: list) -> bool:
    pivots: dict = {}
    for row, val in zip(mat, b):
        row = {k: v for k, v in row.items() if v}
        while row:
            col = min(row)
            if col not in pivots:
                pv = row[col]
                pivots[col] = ({k: v / pv for k, v in row.items()}, val / pv)
                break
            prow, pval = pivots[col]
            f = row[col]
            for k, v in prow.items():
                nv = row.get(k, mpq(0)) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            val = val - f * pval
        else:
            if val:
                return False
    return True


# ---------------------------------------------------------------------------
# CP^n pushforward and the shifted inverse Euler class


def cp_pushforward(ctx: RingContext, f: Sequence, n: int):
    """pi_*(sum_k f_k x^k) over CP^n = sum_{k<=n} f_k [CP^{n-k}].

    ``f`` lists the x-coefficients f_0, f_1, ... (BorelSeries,
    LocalizedBorel or MuElement); it must reach x^n.
    """
    if n < 0:
        raise PreconditionError("CP^n needs n >= 0")
    if len(f) <= n:
        raise PrecisionError(f"pushforward over CP^{n} needs x-coefficients through x^{n}, got {len(f) - 1}", needed=n)
    acc = None
    for k in range(n + 1):
        term = f[k] * cp_class(ctx, n - k)
        acc = term if acc is None else acc + term
    return acc


def shifted_inverse_euler(ctx: RingContext, w: Weight, kmax: int, precision: int) -> list[LocalizedBorel]:
    """x-coefficients h_0..h_kmax of 1/(x +_F e(w)), each with effective precision ``precision``.

    With F(x, y) = y + sum_i x^i phi_i(y) and H_k = e^{k+1} h_k one has
    H_0 = 1 and H_k = -sum_{i=1..k} phi_i(e) e^{i-1} H_{k-i}.
    """
    w = Weight.parse(w)
    r = w.rank
    P = precision + kmax + 1
    e = euler_class(ctx, w, P)
    phis = [None] + [
        _as_borel(e.substitute(ctx.phi_series(i, P).coeffs(), P)) for i in range(1, kmax + 1)
    ]
    epow = e.truncate(P).powers(kmax)
    H = [BorelSeries.one(r, P)]
    for k in range(1, kmax + 1):
        acc = BorelSeries.zero(r, P)
        for i in range(1, k + 1):
            acc = acc + (phis[i] * epow[i - 1] * H[k - i]).truncate(P)
        H.append(_as_borel(-acc))
    return [loc_divide(ctx, H[k].truncate(precision + k + 1), {w: k + 1}) for k in range(kmax + 1)]
