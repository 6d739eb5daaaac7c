"""The Lazard ring, its universal formal group law, and integrality.

MU_* (x) Q is modelled as Q[m_1, m_2, ...] with logarithm
log(x) = x + sum m_i x^{i+1}, so m_i = [CP^i]/(i+1). A context of size N
keeps m_1..m_N; its formal group law is the universal one pushed to
Q[m_1..m_N], whose logarithm is the exact polynomial above. In half-degrees
<= N this is MU_* (x) Q itself. The integral ring is recovered degreewise
as the Z-span of monomials in the coefficients a_ij of F(x, y).
"""

from __future__ import annotations

import os
import threading
from functools import lru_cache
from math import factorial

from gmpy2 import mpq

from .errors import PreconditionError, ResourceError, TruncationError
from .lattice import RationalLattice
from .mu import ONE, ZERO, MuElement, mono_degree
from .series import INFINITE_PREC, PowerSeries

DEFAULT_MAX_N = 12
MAX_DEGREE_ENV = "BORDISM_MAX_DEGREE"

PowerSeries1 = PowerSeries


def configured_max_n() -> int:
    raw = os.environ.get(MAX_DEGREE_ENV)
    if raw:
        try:
            return max(DEFAULT_MAX_N, int(raw))
        except ValueError:
            pass
    return DEFAULT_MAX_N


@lru_cache(maxsize=None)
def monomials_of_degree(k: int, nmax: int) -> tuple:
    """Exponent tuples of half-degree k in m_1..m_nmax, in a fixed order."""
    out = []

    def rec(part, remaining, largest):
        if remaining == 0:
            exps = [0] * (max(part) if part else 0)
            for p in part:
                exps[p - 1] += 1
            out.append(tuple(exps))
            return
        for i in range(min(remaining, largest), 0, -1):
            rec(part + [i], remaining - i, i)

    rec([], k, nmax)
    return tuple(sorted(out))


def partition_count(k: int, nmax: int | None = None) -> int:
    return len(monomials_of_degree(k, k if nmax is None else nmax))


class RingContext:
    """Truncation data and cached tables for MU_* with generators m_1..m_N.

    Immutable after construction from the caller's point of view; lazily
    extended tables (higher a_ij, lattices above N) are filled under a lock.
    """

    def __init__(self, N: int):
        self.N = N
        self._lock = threading.RLock()
        self._exp: list[MuElement] = [ZERO, ONE]
        self._phi: dict[int, list[MuElement]] = {}
        self._phi_prec = -1
        self._lattices: dict[int, RationalLattice] = {}
        self._a_cache: dict[tuple[int, int], MuElement] = {}

    def __repr__(self):
        return f"RingContext(N={self.N})"

    # -- logarithm and exponential --------------------------------------

    def log_coeff(self, k: int) -> MuElement:
        """Coefficient of x^k in the logarithm (exact; zero beyond N+1)."""
        if k == 1:
            return ONE
        if 2 <= k <= self.N + 1:
            return MuElement.gen(k - 1)
        return ZERO

    def log_coeffs(self) -> list[MuElement]:
        return [self.log_coeff(k) for k in range(self.N + 2)]

    def exp_coeffs(self, upto: int) -> list[MuElement]:
        """Coefficients e_0..e_upto of the compositional inverse of log."""
        with self._lock:
            if len(self._exp) <= upto:
                self._extend_exp(upto)
            return self._exp[: upto + 1]

    def _extend_exp(self, upto: int):
        # e(log x) = x, solved degree by degree: e_k = -sum_{j<k} e_j [x^k] log^j
        log = PowerSeries.from_coeffs(self.log_coeffs(), INFINITE_PREC).truncate(upto)
        powers = log.powers(upto)
        exp = [ZERO, ONE]
        for k in range(2, upto + 1):
            acc = ZERO
            for j in range(1, k):
                if exp[j]:
                    acc = acc + exp[j] * powers[j][(k,)]
            exp.append(-acc)
        self._exp = exp

    # -- F(x, y) = y + sum_j x^j phi_j(y) -------------------------------

    def phi_series(self, j: int, prec: int) -> PowerSeries:
        """phi_j(y) with F(x, y) = y + sum_{j>=1} x^j phi_j(y), through y^prec."""
        with self._lock:
            if prec > self._phi_prec or j not in self._phi:
                self._extend_phi(max(j, max(self._phi, default=0)), max(prec, self._phi_prec))
            return PowerSeries.from_coeffs(self._phi[j][: prec + 1], prec)

    def _extend_phi(self, jmax: int, prec: int):
        # exp(Y + h) = sum_k D^k(y) h^k / k! with Y = log y, h = log x and
        # D = (1 / log'(y)) d/dy, so phi_j = sum_k [x^j](h^k)/k! * D^k(y).
        work = prec + jmax + 1
        log_y = PowerSeries.from_coeffs(self.log_coeffs(), INFINITE_PREC).truncate(work)
        w = log_y.derivative().truncate(work).inverse()
        d_pows = [PowerSeries.var(0, 1, work)]
        for _ in range(jmax):
            d_pows.append((d_pows[-1].derivative() * w).truncate(work))
        h = PowerSeries.from_coeffs(self.log_coeffs(), INFINITE_PREC).truncate(jmax)
        h_pows = h.powers(jmax)
        table = {}
        for j in range(1, jmax + 1):
            acc = PowerSeries.zero(1, prec)
            for k in range(1, j + 1):
                c = h_pows[k][(j,)]
                if c:
                    acc = acc + d_pows[k].truncate(prec).scale(c.scale(mpq(1, factorial(k))))
            table[j] = acc.coeffs()
        self._phi = table
        self._phi_prec = prec

    def a(self, i: int, j: int) -> MuElement:
        """Coefficient a_ij of x^i y^j in F(x, y) (i, j >= 1)."""
        if i < 1 or j < 1:
            raise PreconditionError("a_ij is tabulated for i, j >= 1; a_{i0} is 0 or 1")
        if i > j:
            i, j = j, i
        key = (i, j)
        c = self._a_cache.get(key)
        if c is None:
            c = self.phi_series(i, j)[(j,)]
            with self._lock:
                self._a_cache[key] = c
        return c

    def a_table(self, max_half_degree: int | None = None) -> dict:
        """All a_ij with i + j - 1 <= max_half_degree (default N)."""
        d = self.N if max_half_degree is None else max_half_degree
        return {(i, j): self.a(i, j) for i in range(1, d + 1) for j in range(1, d + 2 - i)}

    # -- integral lattices ------------------------------------------------

    def lattice(self, k: int) -> RationalLattice:
        """Z-span of a_ij-monomials of half-degree k inside Q[m_1..m_N]_k."""
        with self._lock:
            lat = self._lattices.get(k)
            if lat is None:
                lat = self._build_lattice(k)
                self._lattices[k] = lat
            return lat

    def _build_lattice(self, k: int) -> RationalLattice:
        monos = monomials_of_degree(k, self.N)
        index = {m: i for i, m in enumerate(monos)}
        vectors = []
        for d in range(1, k + 1):
            gens = [self.a(i, d + 1 - i) for i in range(1, (d + 1) // 2 + 1)]
            lower = [ONE] if d == k else lattice_elements(self, k - d)
            for g in gens:
                for b in lower:
                    vectors.append(_coords(g * b, index))
        lat = RationalLattice(vectors, len(monos))
        if lat.rank != len(monos):
            raise AssertionError(f"lattice in degree {k} has rank {lat.rank}, expected {len(monos)}")
        return lat

    def lattice_rank(self, k: int) -> int:
        return self.lattice(k).rank


def lattice_elements(ctx: RingContext, k: int) -> list[MuElement]:
    """A Z-basis of the integral lattice in half-degree k, as MuElements."""
    monos = monomials_of_degree(k, ctx.N)
    return [
        MuElement({m: c for m, c in zip(monos, row) if c}) for row in ctx.lattice(k).basis()
    ]


def _coords(x: MuElement, index: dict) -> list[mpq]:
    v = [mpq(0)] * len(index)
    for m, c in x.items():
        v[index[m]] = c
    return v


# ---------------------------------------------------------------------------
# public operations


def make_context(N: int, max_N: int | None = None) -> RingContext:
    """Build a context with m_1..m_N, caching a_ij and lattices through N."""
    if not isinstance(N, int) or N < 1:
        raise PreconditionError(f"N must be a positive integer, got {N!r}")
    limit = configured_max_n() if max_N is None else max_N
    if N > limit:
        raise ResourceError(f"N={N} exceeds the configured maximum {limit} (set {MAX_DEGREE_ENV})")
    ctx = RingContext(N)
    ctx.a_table()
    for k in range(1, N + 1):
        ctx.lattice(k)
    return ctx


def log_series(ctx: RingContext) -> PowerSeries:
    """x + m_1 x^2 + ... + m_N x^{N+1}, truncated at x^{N+1}."""
    return PowerSeries.from_coeffs(ctx.log_coeffs(), ctx.N + 1)


def exp_series(ctx: RingContext, prec: int | None = None) -> PowerSeries:
    """Compositional inverse of the logarithm, through x^prec (default N+1)."""
    prec = ctx.N + 1 if prec is None else prec
    return PowerSeries.from_coeffs(ctx.exp_coeffs(prec), prec)


def _log_of(ctx: RingContext, x: PowerSeries) -> PowerSeries:
    if x.constant_term():
        raise PreconditionError("formal group law arguments need a zero constant term")
    return x.substitute(ctx.log_coeffs())


def _exp_of(ctx: RingContext, z: PowerSeries) -> PowerSeries:
    prec = z.prec
    if prec >= INFINITE_PREC // 2:
        raise PreconditionError("truncate exact series before exponentiating")
    return z.substitute(ctx.exp_coeffs(max(prec, 1)))


def fgl_add(ctx: RingContext, p: PowerSeries, q: PowerSeries) -> PowerSeries:
    """F(p, q) = exp(log p + log q)."""
    return _exp_of(ctx, _log_of(ctx, p) + _log_of(ctx, q))


def n_series(ctx: RingContext, n: int, x: PowerSeries) -> PowerSeries:
    """[n]_F x = exp(n log x); negative n gives iterated formal inverses."""
    if n == 0:
        if x.constant_term():
            raise PreconditionError("the n-series needs a zero constant term")
        return PowerSeries.zero(x.nvars, x.prec)
    return _exp_of(ctx, _log_of(ctx, x).scale(n))


def formal_inverse(ctx: RingContext, x: PowerSeries) -> PowerSeries:
    """The series i(x) with F(x, i(x)) = 0."""
    return n_series(ctx, -1, x)


def cp_class(ctx: RingContext, n: int) -> MuElement:
    """[CP^n] = (n+1) m_n, and [CP^0] = 1."""
    if n < 0:
        raise PreconditionError("CP^n needs n >= 0")
    if n > ctx.N:
        raise TruncationError(f"[CP^{n}] needs N >= {n}, context has N={ctx.N}")
    if n == 0:
        return ONE
    return MuElement.gen(n).scale(n + 1)


def is_integral(ctx: RingContext, x: MuElement) -> bool:
    """True iff every homogeneous component lies in the Lazard lattice."""
    x = MuElement.coerce(x)
    if x.max_generator() > ctx.N:
        raise TruncationError(f"element uses m_i with i > N={ctx.N}")
    by_degree: dict[int, dict] = {}
    for m, c in x.items():
        by_degree.setdefault(mono_degree(m), {})[m] = c
    for k, part in sorted(by_degree.items()):
        if k == 0:
            if part[()].denominator != 1:
                return False
            continue
        monos = monomials_of_degree(k, ctx.N)
        vec = [part.get(m, mpq(0)) for m in monos]
        if vec not in ctx.lattice(k):
            return False
    return True


def express_in_aij(ctx: RingContext, x: MuElement) -> dict:
    """Rational coordinates of x on a fixed basis of a_ij-monomials.

    Keys are tuples of (i, j) pairs. The basis in each degree is the first
    linearly independent run of monomials in a deterministic enumeration.
    """
    x = MuElement.coerce(x)
    out: dict = {}
    for k in sorted(x.degrees()):
        part = x.homogeneous_part(k)
        if k == 0:
            out[()] = part.constant()
            continue
        names, mat = _aij_basis(ctx, k)
        monos = monomials_of_degree(k, ctx.N)
        rhs = [part.terms().get(m, mpq(0)) for m in monos]
        sol = _solve_square(mat, rhs)
        for name, c in zip(names, sol):
            if c:
                out[name] = out.get(name, mpq(0)) + c
    return out


def _aij_monomials(k: int, dmin: int = 1):
    # multisets of pairs (i, j), i <= j, with sum (i + j - 1) = k
    pairs = [(i, d + 1 - i) for d in range(dmin, k + 1) for i in range(1, (d + 1) // 2 + 1)]

    def rec(start, remaining, acc):
        if remaining == 0:
            yield tuple(acc)
            return
        for idx in range(start, len(pairs)):
            i, j = pairs[idx]
            d = i + j - 1
            if d <= remaining:
                yield from rec(idx, remaining - d, acc + [(i, j)])

    yield from rec(0, k, [])


@lru_cache(maxsize=None)
def _aij_basis_cached(ctx: RingContext, k: int):
    monos = monomials_of_degree(k, ctx.N)
    index = {m: i for i, m in enumerate(monos)}
    names, cols, echelon = [], [], []
    for name in _aij_monomials(k):
        val = ONE
        for i, j in name:
            val = val * ctx.a(i, j)
        v = _coords(val, index)
        if _independent(echelon, v):
            names.append(name)
            cols.append(v)
            if len(names) == len(monos):
                break
    mat = [[cols[c][r] for c in range(len(cols))] for r in range(len(monos))]
    return tuple(names), mat


def _aij_basis(ctx, k):
    return _aij_basis_cached(ctx, k)


def _independent(echelon: list, v: list) -> bool:
    v = list(v)
    for piv, row in echelon:
        if v[piv]:
            f = v[piv] / row[piv]
            v = [a - f * b for a, b in zip(v, row)]
    for p, a in enumerate(v):
        if a:
            echelon.append((p, v))
            return True
    return False


def _solve_square(mat: list, rhs: list) -> list:
    n = len(rhs)
    aug = [list(row) + [b] for row, b in zip(mat, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [a / p for a in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]
