import pytest
from hypothesis import given, settings

from bordism import FixedDatum, MuElement, ParseError, PreconditionError, Weight, antipode, in_cone
from bordism.fixedring import FixedMonomial

from strategies import fixed_data

V = Weight((1,))
e = lambda w=V, k=1: FixedDatum.euler(w, k)  # noqa: E731
Y = lambda d, w=V: FixedDatum.y_class(w, d)  # noqa: E731


def test_arithmetic_basics():
    assert e() * e(V, -1) == FixedDatum.one(1)
    assert Y(2) * Y(2) == FixedDatum.y_class(V, 2, 2)
    x, y, z = Y(2), e(V, -1), Y(3)
    assert (x + y) * z == x * z + y * z


def test_degrees():
    assert e(V, -1).degree() == 2
    assert e().degree() == -2
    for d in range(2, 6):
        assert Y(d).degree() == 2 * d
    assert (Y(2) + e(V, -2)).degree() == 4
    assert FixedDatum.const(MuElement.gen(2), 1).degree() == 4
    assert not (Y(2) + Y(3)).is_homogeneous()


def test_homogeneous_components():
    x = Y(2) + Y(3) + e(V, -2)
    comps = x.homogeneous_components()
    assert sorted(comps) == [4, 6]
    assert comps[4] == Y(2) + e(V, -2)


def test_cone_examples():
    assert in_cone(e(V, -2) * Y(3))
    assert not in_cone(e())
    assert in_cone(Y(2) + e(V.dual(), -1))


def test_antipode_anchors():
    assert antipode(e()) == e()
    assert antipode(e(V, -1)) == e(V, -1)
    assert antipode(Y(2)) == -Y(2)
    assert antipode(Y(3)) == -Y(3) + e() * Y(2) * Y(2)


def test_antipode_level_four():
    # chi(b3) = -b3 + 2 b1 b2 - b1^3
    expected = -Y(4) + (e() * Y(2) * Y(3)).scale(2) - e(V, 2) * Y(2) ** 3
    assert antipode(Y(4)) == expected


def test_level_one_is_inverse_euler():
    assert FixedDatum.y_class(V, 1) == e(V, -1)
    with pytest.raises(PreconditionError):
        FixedMonomial.make((), {(V, 1): 1})


def test_rank_mismatch():
    with pytest.raises(PreconditionError):
        e(Weight((1,))) + e(Weight((1, 0)))


def test_rendering():
    assert str(Y(2) + e(V.dual(), -2)) == "Y_{(1),2} + e_{(-1)}^{-2}"
    assert str(Y(3).scale(-1) + (e() * Y(2) * Y(2))) == "-Y_{(1),3} + e_{(1)}*Y_{(1),2}^2"
    assert str(FixedDatum(1)) == "0"


def test_json_forms():
    x = (Y(2) + e(V.dual(), -2)).scale(MuElement.gen(1))
    assert FixedDatum.from_json(x.to_json()) == x
    bare = FixedDatum.from_json({"e": {"(1)": 1}})
    assert bare == e()
    with pytest.raises(ParseError):
        FixedDatum.from_json({"y": [["(1)", 1]]})
    with pytest.raises(ParseError):
        FixedDatum.from_json({"e": {"(1)": 1}, "q": 3})
    with pytest.raises(ParseError):
        FixedDatum.from_json({"e": {"(1)": 1, "(1,0)": -1}})


@given(fixed_data())
def test_antipode_is_involution(x):
    assert antipode(antipode(x)) == x


@settings(max_examples=30)
@given(fixed_data(r=1, max_terms=3), fixed_data(r=1, max_terms=3))
def test_antipode_is_multiplicative(x, y):
    assert antipode(x * y) == antipode(x) * antipode(y)
    assert antipode(x + y) == antipode(x) + antipode(y)


@given(fixed_data())
def test_antipode_preserves_degree(x):
    assert antipode(x).degrees() <= x.degrees()


@given(fixed_data(r=1, max_terms=3), fixed_data(r=1, max_terms=3))
def test_cone_is_multiplicative(x, y):
    if in_cone(x) and in_cone(y):
        assert in_cone(x * y)
        assert in_cone(x + y)


@given(fixed_data(), fixed_data())
def test_normal_form_canonical(x, y):
    r = x.rank
    y = FixedDatum(r, {}) if y.rank != r else y
    assert (x + y) - y == x
    assert hash(x + y) == hash(y + x)


@given(fixed_data())
def test_json_round_trip(x):
    assert FixedDatum.from_json(x.to_json()) == x
