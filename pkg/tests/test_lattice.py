import sympy as sp
from gmpy2 import mpq
from hypothesis import assume, given
from hypothesis import strategies as st

from bordism.lattice import IntLattice, RationalLattice, xgcd

vec3 = st.lists(st.integers(-20, 20), min_size=3, max_size=3)


@given(st.integers(-500, 500), st.integers(-500, 500))
def test_xgcd(a, b):
    x, y, g = xgcd(a, b)
    assert x * a + y * b == g
    assert g == sp.igcd(a, b)


def test_hnf_shape():
    lat = IntLattice(2, [[2, 1], [0, 3], [4, 5]])
    basis = lat.basis()
    # pivots positive, entries above pivots reduced
    assert basis[0][0] > 0 and basis[1][1] > 0
    assert 0 <= basis[0][1] < basis[1][1]
    assert lat.rank == 2


def test_membership_small():
    lat = IntLattice(2, [[2, 0], [0, 2]])
    assert [4, -2] in lat
    assert [1, 0] not in lat
    assert lat.coordinates([2, 4]) == [1, 2]


@given(st.lists(vec3, min_size=1, max_size=4), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_generated_lattice_contains_combinations(vectors, coeffs):
    lat = IntLattice(3, vectors)
    combo = [sum(c * v[i] for c, v in zip(coeffs, vectors)) for i in range(3)]
    assert combo in lat
    assert lat.rank == sp.Matrix(vectors).rank()


@given(st.lists(vec3, min_size=3, max_size=3), vec3)
def test_membership_matches_rational_solve(vectors, target):
    mat = sp.Matrix(vectors).T
    assume(mat.det() != 0)
    sol = mat.solve(sp.Matrix(target))
    integral = all(s.is_integer for s in sol)
    assert (target in IntLattice(3, vectors)) == integral


def test_rational_lattice():
    lat = RationalLattice([[mpq(1, 2), 0], [0, mpq(1, 3)]], 2)
    assert [mpq(3, 2), mpq(2, 3)] in lat
    assert [mpq(1, 4), 0] not in lat
    assert lat.rank == 2
