from hypothesis import given
from hypothesis import strategies as st

from lalreg.types import (NAT, UNIT, BangT, Lolli, Mu, ParT, RegT, TVar, alpha_eq,
                          free_tvars, is_guarded, show_type, tsubst, unroll)
from lalreg.syntax import parse_type


def test_unroll():
    t = Mu("X", Lolli(ParT(TVar("X")), NAT))
    assert unroll(t) == Lolli(ParT(t), NAT)


def test_mu_alpha_equivalence():
    assert alpha_eq(Mu("X", BangT(TVar("X"))), Mu("Y", BangT(TVar("Y"))))
    assert not alpha_eq(Mu("X", BangT(TVar("X"))), Mu("Y", ParT(TVar("Y"))))


def test_guardedness():
    assert not is_guarded("X", TVar("X"))
    assert is_guarded("X", BangT(TVar("X")))
    assert not is_guarded("X", Lolli(TVar("X"), UNIT))
    assert is_guarded("X", Mu("X", TVar("X")))


def test_capture_avoiding_type_substitution():
    t = Mu("Y", Lolli(TVar("X"), TVar("Y")))
    out = tsubst(t, "X", TVar("Y"))
    assert isinstance(out, Mu) and out.var != "Y"
    assert free_tvars(out) == {"Y"}


types = st.recursive(
    st.one_of(st.sampled_from([UNIT, NAT]), st.builds(TVar, st.sampled_from("XY"))),
    lambda t: st.one_of(st.builds(Lolli, t, t), st.builds(BangT, t), st.builds(ParT, t),
                        st.builds(Mu, st.sampled_from("XY"), t),
                        st.builds(RegT, st.just("r"), t)),
    max_leaves=6)


@given(types)
def test_type_round_trip(t):
    assert alpha_eq(parse_type(show_type(t)), t)
