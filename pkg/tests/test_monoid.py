import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lalreg.monoid import (LAWS, ZERO, AddFrame, BangFrame, MContext, MonoidElem, ParFrame,
                           Poly, check_law, ctx_apply, elem, leq_falsify, madd, mbang, mF,
                           mnat, mpar, norm, norm_add, random_elem)

from conftest import SEED

LAW_ELEMENTS = 2_000


def test_poly_normalizes_trailing_zeros():
    assert Poly.of(1, 0, 0) == Poly.of(1)
    assert Poly.of(0, 0).coeffs == ()
    assert Poly.of(3, 0, 2)(2) == 11
    with pytest.raises(ValueError):
        Poly.of(1, -1)


def test_madd_examples():
    assert madd(elem(2, 1, [1]), elem(3, 4, [0, 1])) == elem(5, 4, [1, 1])
    p = elem(1, 2, [0, 1])
    assert madd(p, p) == elem(2, 2, [0, 1])


def test_norm_examples():
    assert norm(elem(3, 0, [1])) == 3
    assert norm(elem(0, 7, [1, 2, 3])) == 0
    assert norm(elem(1, 3, [0, 0, 0, 0, 0, 0, 1])) == 4096


def test_modal_examples():
    assert mbang(elem(2, 1, [0, 1])) == elem(1, 3, [0] * 6 + [1])
    assert mbang(elem(0, 0, [1])) == elem(1, 0, [0, 0, 0, 1])
    assert norm(mbang(elem(2, 1, [0, 1]))) == 4096
    assert mpar(elem(4, 2, [0, 1])) == elem(2, 2, [0, 0, 0, 0, 1])
    assert mpar(elem(5, 2, [1])) == elem(3, 2, [0, 0, 1])
    assert mpar(elem(0, 0, [1])) == elem(0, 0, [0, 0, 1])
    assert mF(elem(2, 1, [1])) == elem(4, 1, [0, 0, 0, 1])
    assert mF(elem(0, 0, [1])) == elem(1, 0, [0, 0, 0, 1])


def test_constants():
    assert mnat(0) == elem(0, 0, [1]) == ZERO
    assert norm(mnat(5)) == 5


def test_rendering_and_json():
    p = elem(2, 1, [3, 0, 2])
    assert str(p) == "(2, 1, 3 + 2*x^2)"
    assert p.to_json() == {"n": 2, "m": 1, "coeffs": [3, 0, 2]}
    assert MonoidElem.from_json(p.to_json()) == p
    with pytest.raises(ValueError):
        elem(-1, 0, [1])


def test_successor_adds_at_least_one(rng):
    for _ in range(10_000):
        p = random_elem(rng)
        assert norm(madd(p, mnat(1))) >= norm(p) + 1


def test_m_contexts():
    p, q = elem(2, 1, [1, 1]), elem(1, 5, [2])
    assert ctx_apply([AddFrame(q)], p) == madd(p, q)
    assert ctx_apply([ParFrame(), BangFrame()], p) == mbang(mpar(p))
    assert MContext((BangFrame(), AddFrame(q)))(p) == madd(mbang(p), q)
    with pytest.raises(ValueError):
        MContext(())


def test_falsifier_examples(rng):
    rs = [random_elem(rng) for _ in range(100)]
    for _ in range(200):
        p, s = random_elem(rng), random_elem(rng)
        assert leq_falsify(p, madd(p, s), rs) is None
    assert leq_falsify(mnat(2), mnat(1), [mnat(0)]) == mnat(0)
    with pytest.raises(ValueError):
        leq_falsify(ZERO, ZERO, [])


def test_norm_add_matches_definition(rng):
    for _ in range(5_000):
        p, q = random_elem(rng), random_elem(rng)
        assert norm_add(p, q) == norm(madd(p, q))


def test_compatibility(rng):
    rs = [random_elem(rng) for _ in range(100)]
    for _ in range(1_000):
        p, s, r = random_elem(rng), random_elem(rng), random_elem(rng)
        q = madd(p, s)
        assert norm(p) <= norm(q)
        assert leq_falsify(madd(p, r), madd(q, r), rs) is None


elems = st.builds(MonoidElem, st.integers(0, 20), st.integers(0, 20),
                  st.lists(st.integers(0, 5), max_size=5).map(lambda c: Poly(tuple(c))))


@given(elems, elems, elems)
def test_madd_associative(p, q, r):
    assert madd(madd(p, q), r) == madd(p, madd(q, r))


@given(elems, elems)
def test_madd_commutative(p, q):
    assert madd(p, q) == madd(q, p)


@given(elems)
def test_zero_is_neutral_up_to_constant(p):
    # ZERO carries the constant polynomial 1, so it is neutral only on polynomials with c0 >= 1
    s = madd(p, ZERO)
    assert s.n == p.n and s.m == p.m and norm(s) >= norm(p)


@pytest.mark.parametrize("law", sorted(LAWS))
def test_monoid_law(law):
    res = check_law(law, random.Random(SEED), elements=LAW_ELEMENTS)
    assert res.holds, f"{res.counterexamples}/{res.checked} counterexamples, first {res.example}"
