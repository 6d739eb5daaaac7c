"""Fixed-point data to localized Borel cobordism, and the realizability test.

A fixed-point datum is realizable when it lies in the geometric cone and its
localized Borel image is an honest power series with integral coefficients.
Negative verdicts carry a witness and are certificates; positive verdicts
only say that no obstruction exists through the stated precision.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .borel import (
    BorelSeries,
    Integralization,
    LocalizedBorel,
    Weight,
    cp_pushforward,
    euler_class,
    loc_divide,
    shifted_inverse_euler,
    try_integralize,
)
from .errors import PrecisionError, PreconditionError
from .fixedring import FixedDatum, in_cone
from .geometry import CatalogBounds, ManifoldExpr, catalog, phi_omega, underlying_class
from .lazard import RingContext
from .mu import MuElement
from .series import INFINITE_PREC


def project(ctx: RingContext, c: MuElement) -> MuElement:
    """Image of c in Q[m_1..m_N]: generators beyond N map to zero."""
    if c.max_generator() <= ctx.N:
        return c
    return MuElement({m: v for m, v in c.items() if len(m) <= ctx.N})


@lru_cache(maxsize=2048)
def y_image(ctx: RingContext, w: Weight, d: int, precision: int) -> LocalizedBorel:
    """Pushforward over CP^{d-1} of 1/(x +_F e(w)), as a fraction over e(w)^d."""
    hs = shifted_inverse_euler(ctx, w, d - 1, precision)
    return cp_pushforward(ctx, hs, d - 1).truncate(precision)


@lru_cache(maxsize=2048)
def _inverse_euler_power(ctx, w: Weight, k: int, precision: int) -> LocalizedBorel:
    one = BorelSeries.one(w.rank, precision + k)
    return loc_divide(ctx, one, {w: k})


def _monomial_image(ctx, mono, rank: int, D: int) -> LocalizedBorel:
    poles = sum(-k for _, k in mono.e if k < 0) + sum(d * k for (_, d), k in mono.y)
    target = D + poles
    out = LocalizedBorel(ctx, BorelSeries.one(rank, INFINITE_PREC))
    for w, k in mono.e:
        if k > 0:
            e = euler_class(ctx, w, target + k)
            for _ in range(k):
                out = out * e
        else:
            out = out * _inverse_euler_power(ctx, w, -k, target)
    for (w, d), k in mono.y:
        img = y_image(ctx, w, d, target)
        for _ in range(k):
            out = out * img
    return out


def localize(ctx: RingContext, x: FixedDatum, D: int) -> LocalizedBorel:
    """Localized Borel image of x with effective precision D.

    e_V goes to e(V), e_V^{-1} to 1/e(V), and Y_{V,d} to the CP^{d-1}
    pushforward of 1/(x +_F e(V)).
    """
    if D < 0:
        raise PrecisionError(f"Borel degree must be >= 0, got {D}", needed=0)
    r = x.rank
    acc = LocalizedBorel(ctx, BorelSeries.zero(r, INFINITE_PREC))
    for mono, c in x.sorted_items():
        c = project(ctx, c)
        if not c:
            continue
        acc = acc + _monomial_image(ctx, mono, r, D).scale(c)
    if acc.precision < D:
        raise PrecisionError(f"localization reached precision {acc.precision} < {D}", needed=D)
    return acc.truncate(D)


@dataclass(frozen=True)
class Verdict:
    """Outcome of the realizability test for one graded component or a whole datum."""

    realizable: bool
    cone_ok: bool
    integrality: Integralization
    degree: int | None = None
    components: tuple = field(default_factory=tuple)

    @property
    def integrality_ok(self) -> bool:
        return self.integrality.ok

    @property
    def witness(self):
        return self.integrality.witness

    @property
    def precision(self) -> int:
        return self.integrality.precision

    @property
    def constant_term(self) -> MuElement | None:
        s = self.integrality.series
        if s is None or not self.integrality.ok:
            return None
        return s.constant_term()

    def to_json(self) -> dict:
        ct = self.constant_term
        out = {
            "realizable": self.realizable,
            "cone_ok": self.cone_ok,
            "integrality": self.integrality.to_json(),
            "constant_term": ct.to_json() if ct is not None else None,
        }
        if self.degree is not None:
            out["degree"] = self.degree
        if self.components:
            out["components"] = [c.to_json() for c in self.components]
        return out


def _judge(ctx, x: FixedDatum, D: int) -> Verdict:
    cone = in_cone(x)
    integ = try_integralize(ctx, localize(ctx, x, D))
    return Verdict(cone and integ.ok, cone, integ, degree=x.degree())


def realizable(ctx: RingContext, x: FixedDatum, D: int) -> Verdict:
    """Cone membership plus integrality of the localized image, degree by degree."""
    comps = x.homogeneous_components()
    if len(comps) <= 1:
        return _judge(ctx, x, D)
    parts = tuple(_judge(ctx, c, D) for c in comps.values())
    first_bad = next((p for p in parts if not p.integrality.ok), None)
    integ = first_bad.integrality if first_bad is not None else Integralization(
        True, None, None, min(p.precision for p in parts)
    )
    return Verdict(
        all(p.realizable for p in parts),
        all(p.cone_ok for p in parts),
        integ,
        degree=None,
        components=parts,
    )


def augmentation_check(ctx: RingContext, m: ManifoldExpr, D: int, rank: int | None = None) -> bool:
    """Constant term of the integralized image equals the underlying class."""
    res = try_integralize(ctx, localize(ctx, phi_omega(m, rank), D))
    if not res.ok:
        return False
    return res.series.constant_term() == project(ctx, underlying_class(m))


@dataclass(frozen=True)
class EntryReport:
    expr: ManifoldExpr
    cone_ok: bool
    integral_ok: bool
    augmentation_ok: bool
    witness: object = None

    @property
    def ok(self) -> bool:
        return self.cone_ok and self.integral_ok and self.augmentation_ok


@dataclass(frozen=True)
class CatalogReport:
    rank: int
    D: int
    entries: tuple

    @property
    def failures(self) -> list:
        return [e for e in self.entries if not e.ok]

    @property
    def ok(self) -> bool:
        return not self.failures

    def counts(self) -> dict:
        n = len(self.entries)
        return {
            "total": n,
            "cone": sum(e.cone_ok for e in self.entries),
            "integral": sum(e.integral_ok for e in self.entries),
            "augmentation": sum(e.augmentation_ok for e in self.entries),
            "failures": len(self.failures),
        }

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "D": self.D,
            "passed": self.ok,
            "counts": self.counts(),
            "failures": [
                {
                    "expr": f.expr.to_json(),
                    "cone_ok": f.cone_ok,
                    "integral_ok": f.integral_ok,
                    "augmentation_ok": f.augmentation_ok,
                    "witness": f.witness.to_json() if f.witness is not None else None,
                }
                for f in self.failures
            ],
        }


def check_entry(ctx: RingContext, m: ManifoldExpr, r: int, D: int) -> EntryReport:
    x = phi_omega(m, r)
    res = try_integralize(ctx, localize(ctx, x, D))
    aug = res.ok and res.series.constant_term() == project(ctx, underlying_class(m))
    return EntryReport(m, in_cone(x), res.ok, aug, res.witness)


def verify_catalog(
    ctx: RingContext,
    r: int,
    D: int,
    bounds: CatalogBounds | None = None,
    workers: int = 1,
) -> CatalogReport:
    """Run cone, integrality and augmentation checks over the catalog.

    Results come back in catalog order whatever the worker count.
    """
    if workers < 1:
        raise PreconditionError("workers must be >= 1")
    entries = catalog(r, bounds)
    if workers == 1:
        results = [check_entry(ctx, m, r, D) for m in entries]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda m: check_entry(ctx, m, r, D), entries))
    return CatalogReport(r, D, tuple(results))
