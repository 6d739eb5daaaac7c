from hypothesis import strategies as st

from bordism import FixedDatum, MuElement, Weight
from bordism.fixedring import FixedMonomial

small_int = st.integers(min_value=-3, max_value=3)


def weights(r=None, bound=3):
    rank = st.just(r) if r is not None else st.integers(1, 2)
    return rank.flatmap(
        lambda n: st.lists(st.integers(-bound, bound), min_size=n, max_size=n)
        .filter(any)
        .map(lambda v: Weight(tuple(v)))
    )


@st.composite
def mu_elements(draw, max_gen=3, max_terms=4, max_exp=2):
    terms = draw(
        st.dictionaries(
            st.lists(st.integers(0, max_exp), min_size=0, max_size=max_gen).map(tuple),
            st.fractions(min_value=-5, max_value=5, max_denominator=4),
            max_size=max_terms,
        )
    )
    return MuElement(terms)


@st.composite
def fixed_monomials(draw, r, max_level=5):
    ws = draw(st.lists(weights(r), min_size=0, max_size=2, unique=True))
    e = {w: draw(st.integers(-2, 2)) for w in ws}
    y = {}
    for w in draw(st.lists(weights(r), min_size=0, max_size=2)):
        d = draw(st.integers(2, max_level))
        y[(w, d)] = y.get((w, d), 0) + draw(st.integers(1, 2))
    return FixedMonomial.make(e, y)


@st.composite
def fixed_data(draw, r=None, max_terms=6, max_level=5):
    rank = r if r is not None else draw(st.integers(1, 2))
    monos = draw(st.lists(fixed_monomials(rank, max_level), min_size=0, max_size=max_terms))
    terms = {}
    for m in monos:
        c = draw(mu_elements(max_gen=2, max_terms=2))
        terms[m] = terms.get(m, MuElement()) + c
    return FixedDatum(rank, terms)
