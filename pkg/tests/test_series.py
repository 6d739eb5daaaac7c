import pytest
from hypothesis import given
from hypothesis import strategies as st

from bordism import MuElement, PowerSeries, PreconditionError
from bordism.series import INFINITE_PREC

m1 = MuElement.gen(1)


def uni(coeffs, prec=None):
    return PowerSeries.from_coeffs([MuElement.coerce(c) for c in coeffs], prec)


def test_precision_rule_uses_valuations():
    a = uni([0, 1, 2], 4)  # x + 2x^2 + O(5), valuation 1
    b = uni([0, 0, 1], 3)  # x^2 + O(4), valuation 2
    p = a * b
    assert p.prec == min(4 + 2, 3 + 1)
    assert p[(3,)] == 1 and p[(4,)] == 2


def test_coefficient_beyond_precision_raises():
    with pytest.raises(IndexError):
        uni([1, 2], 1)[(2,)]


def test_inverse():
    s = uni([1, m1, 3], 5)
    inv = s.inverse()
    assert (s * inv).agrees(PowerSeries.one(1, 5), 5)


def test_inverse_needs_unit_and_finite_precision():
    with pytest.raises(PreconditionError):
        uni([m1, 1], 3).inverse()
    with pytest.raises(PreconditionError):
        PowerSeries.from_coeffs([1, 1], INFINITE_PREC).inverse()


def test_substitute_composition():
    # (y + y^2) at y = x + x^2 is x + 2x^2 + 2x^3 + x^4
    inner = uni([0, 1, 1], 6)
    out = inner.substitute([0, 1, 1], INFINITE_PREC)
    assert out.coeffs()[:5] == [0, 1, 2, 2, 1]


def test_monomial_shift_and_division():
    c = PowerSeries.var(0, 2, 4)
    s = (c + PowerSeries.var(1, 2, 4)) * c
    assert s.div_monomial((1, 0)).agrees(c + PowerSeries.var(1, 2, 4), 3)
    with pytest.raises(PreconditionError):
        s.div_monomial((0, 1))
    assert s.mul_monomial((0, 1)).prec == s.prec + 1


def test_rendering():
    s = uni([0, 1, m1.scale(-2)], 2)
    assert str(s) == "x - 2*m1*x^2 + O(deg 3)"
    two = PowerSeries.var(0, 2, 1) + PowerSeries.var(1, 2, 1)
    assert str(two) == "C1 + C2 + O(deg 2)"


def test_homological_degree():
    s = uni([0, 1, m1], 3)
    assert s.homological_degrees() == {-2}
    assert s.is_graded_homogeneous(-2)
    assert not uni([1, 1], 2).is_graded_homogeneous()


coeff = st.integers(-4, 4)


@given(st.lists(coeff, min_size=1, max_size=6), st.lists(coeff, min_size=1, max_size=6), st.integers(0, 5))
def test_mul_commutes_and_truncation_is_consistent(a, b, p):
    x, y = uni(a, p), uni(b, p)
    assert (x * y).agrees(y * x)
    full = uni(a, 10) * uni(b, 10)
    assert (x * y).agrees(full, (x * y).prec)


@given(st.lists(coeff, min_size=2, max_size=6).filter(lambda v: v[0] != 0))
def test_inverse_property(a):
    s = uni(a, 5)
    assert (s * s.inverse()).agrees(PowerSeries.one(1, 5), 5)


@given(st.lists(coeff, min_size=1, max_size=4), st.integers(0, 4))
def test_json_round_trip(a, p):
    s = uni(a, p)
    assert PowerSeries.from_json(s.to_json()) == s
