import pytest
import sympy as sp
from hypothesis import given, settings

from bordism import (
    FixedDatum,
    MuElement,
    PrecisionError,
    Proj,
    Weight,
    augmentation_check,
    catalog,
    cp_class,
    localize,
    make_context,
    phi_omega,
    realizable,
    try_integralize,
)
from bordism.borel import recheck_witness
from bordism.realizability import verify_catalog

import oracles
from strategies import fixed_monomials

V = Weight((1,))


def test_localize_inverse_euler(ctx):
    loc = localize(ctx, FixedDatum.euler(V, -1), 4)
    assert loc.den == ((V, 1),)
    assert loc.precision == 4


def test_localize_rotation_sphere(ctx):
    x = FixedDatum.euler(V, -1) + FixedDatum.euler(V.dual(), -1)
    res = try_integralize(ctx, localize(ctx, x, 4))
    assert res.ok and res.series.constant_term() == cp_class(ctx, 1)


def test_localize_anchor_d2(ctx):
    x = FixedDatum.y_class(V, 2) + FixedDatum.euler(V.dual(), -2)
    res = try_integralize(ctx, localize(ctx, x, 4))
    assert res.ok and res.series.constant_term() == cp_class(ctx, 2)


def test_d2_expansion_against_symbolic_laurent_series():
    # Sum of 2[CP^1]/C - phi_1(C)/C^2 and 1/i(C)^2 expanded by sympy.
    N = 3
    ctx = make_context(N)
    c = sp.symbols("c")
    table = oracles.fgl_coeffs(N, 6)
    phi1 = 1 + sum(table.get((1, j), 0) * c**j for j in range(1, 6))
    ex = oracles.exp_coeffs(N, 6)
    neg_log = -oracles.log_poly(c, N)
    inv = sum(ex[n] * neg_log**n for n in range(1, 7))
    m1 = oracles.M[0]
    total = 2 * m1 / c - phi1 / c**2 + 1 / inv**2
    ser = sp.series(total, c, 0, 3).removeO()
    ser = sp.expand(ser)
    assert sp.expand(ser.coeff(c, -1)) == 0 and sp.expand(ser.coeff(c, -2)) == 0
    engine = try_integralize(ctx, localize(ctx, FixedDatum.y_class(V, 2) + FixedDatum.euler(V.dual(), -2), 2))
    for k in range(3):
        assert engine.series[(k,)] == oracles.to_mu(ser.coeff(c, k)), k


def test_realizable_examples(ctx):
    v = realizable(ctx, FixedDatum.euler(V), 5)
    assert not v.realizable and not v.cone_ok
    v = realizable(ctx, FixedDatum.euler(V, -1), 5)
    assert not v.realizable and v.cone_ok
    assert v.witness.kind == "pole" and v.witness.c_degree == 0
    v = realizable(ctx, phi_omega(Proj(((0,), (0,), (1,)))), 5)
    assert v.realizable and v.constant_term == cp_class(ctx, 2)
    assert v.to_json()["integrality"] == {"status": "pass", "precision": 5}


def test_witness_rechecks_independently(ctx):
    x = FixedDatum.euler(Weight((1, 1)), -1) + FixedDatum.euler(Weight((1, 0)), -1)
    v = realizable(ctx, x, 3)
    assert not v.realizable
    assert recheck_witness(ctx, localize(ctx, x, 3), v.witness)


def test_lattice_obstruction(ctx):
    # half of a genuine manifold passes the residue test but not integrality
    x = phi_omega(Proj(((0,), (1,)))).scale(MuElement.const("1/2"))
    v = realizable(ctx, x, 4)
    assert not v.realizable and v.witness.kind == "lattice"
    assert recheck_witness(ctx, localize(ctx, x, 4), v.witness)


def test_witness_stable_under_precision(ctx):
    x = FixedDatum.euler(V, -1)
    ws = {realizable(ctx, x, D).witness for D in range(3, 7)}
    assert len(ws) == 1


def test_heterogeneous_input_is_split(ctx):
    x = phi_omega(Proj(((0,), (1,)))) + FixedDatum.euler(V, -2)
    v = realizable(ctx, x, 4)
    assert len(v.components) == 2
    assert [c.realizable for c in v.components] == [True, False]
    assert not v.realizable


def test_precision_error(ctx):
    with pytest.raises(PrecisionError):
        localize(ctx, FixedDatum.euler(V, -1), -1)


def test_augmentation(ctx):
    for m in catalog(1)[:25]:
        assert augmentation_check(ctx, m, 4), m


def test_verify_catalog_parallel_is_deterministic(ctx):
    from bordism.geometry import CatalogBounds

    b = CatalogBounds(max_lines=3, max_entry=2, compound_lines=2, max_compound=6)
    a = verify_catalog(ctx, 1, 3, b, workers=1)
    p = verify_catalog(ctx, 1, 3, b, workers=4)
    assert a.ok and a.to_json() == p.to_json()
    assert [e.expr for e in a.entries] == [e.expr for e in p.entries]


_CTX = {}


def _c():
    if not _CTX:
        _CTX[0] = make_context(6)
    return _CTX[0]


cone_monomials = fixed_monomials(1, max_level=3).filter(lambda m: m.in_cone())


@settings(max_examples=15)
@given(cone_monomials, cone_monomials)
def test_localize_is_multiplicative(a, b):
    c = _c()
    D = 3
    x, y = FixedDatum(1, {a: 1}), FixedDatum(1, {b: 1})
    # a Laurent product is known to min(D_x - P_y, D_y - P_x)
    px, py = localize(c, x, 0).pole_order, localize(c, y, 0).pole_order
    lx, ly, lxy = localize(c, x, D + py), localize(c, y, D + px), localize(c, x * y, D)
    prod = lx * ly
    assert prod.precision >= D
    diff = (prod - lxy).truncate(D)
    res = try_integralize(c, diff)
    assert res.ok and res.series.is_zero()


@settings(max_examples=15)
@given(cone_monomials)
def test_localize_respects_degree(a):
    c = _c()
    x = FixedDatum(1, {a: 1})
    loc = localize(c, x, 3)
    deg = x.degree()
    # numerator degree minus 2*(pole order) equals the input degree
    assert loc.num.homological_degrees() <= {deg - 2 * loc.pole_order}
