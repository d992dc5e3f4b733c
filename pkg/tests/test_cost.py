import dataclasses
import json
import random

import pytest

from lalreg.cost import (MalformedDerivation, bound, infer_weight, pole_member,
                         saturation_counterexamples, verify)
from lalreg.gen import FAMILIES, random_program
from lalreg.machine import initial, trace
from lalreg.monoid import ZERO, elem, madd, mnat, mpar, random_elem
from lalreg.syntax import (App, Lam, LetBang, LetPar, Term, UnitVal, Var, alpha_eq, parse,
                           parse_term, rename, subterms)
from lalreg.typesystem import check, check_term, erase
from lalreg.types import NAT, UNIT, ParT

from conftest import CORPUS, SEED, corpus_files, load

ID_APP = App(Lam("x", UNIT, Var("x")), UnitVal())
R = {"r": (0, ParT(NAT))}


def test_get_weighs_five():
    w = infer_weight(check_term(parse_term("get(r)"), R, 0))
    assert w.elem == mnat(5)
    assert w.provenance[0].rule == "get" and w.provenance[0].local == "5"


def test_identity_application():
    d = check_term(ID_APP)
    assert infer_weight(d).elem == mnat(3)
    assert bound(d) == 3


def test_value_weighs_nothing():
    assert bound(check_term(UnitVal())) == 0


def test_par_promotion_of_weightless_body():
    w = infer_weight(check_term(parse_term("$()"), {}, 1)).elem
    assert w == madd(mpar(ZERO), mnat(4))
    # (4, 0, 1 + x^2): the constant-1 polynomial of mnat makes the norm 4 * 17
    assert w == elem(4, 0, [1, 0, 1])
    assert bound(check_term(parse_term("$()"), {}, 1)) == 68


def test_arith_is_charged_one_step():
    p = parse(r"(\x:Nat. x + 1) 2")
    r = verify(p)
    assert r.bound == 4 and r.steps == 4


def test_set_row():
    regions = {"r": (1, ParT(NAT))}
    w = infer_weight(check_term(parse_term("set(r, $5)"), regions, 1)).elem
    assert w == madd(mpar(ZERO), mnat(1))


def test_contractions_are_charged():
    one = infer_weight(check(parse("let !x = !5 in $(x + 1)")).derivation).elem
    two = infer_weight(check(parse("let !x = !5 in $(x + x)")).derivation).elem
    assert two.n == one.n + 1


def test_get_after_set_bound_is_frozen():
    p = load(CORPUS / "get_after_set.lal")
    r = verify(p)
    assert r.weight == elem(9, 0, [1, 0, 1])
    assert (r.bound, r.steps, r.ok) == (738, 5, True)


def test_provenance_covers_every_node():
    c = check(load(CORPUS / "dup_across_regions.lal"))
    w = infer_weight(c.derivation)
    assert len(w.provenance) == sum(1 for _ in c.derivation.nodes())
    assert w.provenance[0].total == w.elem


def test_malformed_derivation():
    d = check_term(ID_APP)
    with pytest.raises(MalformedDerivation):
        infer_weight(dataclasses.replace(d, children=d.children[:1]))
    with pytest.raises(MalformedDerivation):
        infer_weight(dataclasses.replace(d, rule="w"))


def test_pole_membership_examples():
    assert pole_member(initial(UnitVal()), ZERO)
    assert not pole_member(initial(ID_APP), mnat(2))
    assert pole_member(initial(ID_APP), mnat(3))
    assert not pole_member(initial(parse_term("get(r)")), mnat(100))


def test_verify_examples():
    r = verify(load(CORPUS / "id.lal"))
    assert (r.bound, r.steps, r.ok, r.margin, r.outcome) == (3, 3, True, 0, "Terminated")
    assert verify(load(CORPUS / "dup_across_regions.lal")).ok
    r = verify(load(CORPUS / "stuck" / "unset_region.lal"))
    assert not r.ok and r.outcome == "EmptyRegion"


def test_fuel_cap_exposes_overrun():
    r = verify(load(CORPUS / "id_chain.lal"), fuel_cap=5)
    assert r.outcome == "OutOfFuel" and not r.ok


def test_report_json_fields():
    obj = json.loads(verify(load(CORPUS / "id.lal")).dumps())
    assert list(obj) == ["name", "size", "depth", "weight", "bound", "steps", "outcome", "ok", "margin"]
    assert obj["weight"] == {"n": 3, "m": 0, "coeffs": [1]}


def _rename_binders(m, suffix):
    """Rename every binder (and its bound occurrences) by appending ``suffix``."""
    fields = {}
    for f in dataclasses.fields(m):
        v = getattr(m, f.name)
        fields[f.name] = _rename_binders(v, suffix) if isinstance(v, Term) else v
    out = type(m)(**fields)
    if isinstance(out, (Lam, LetBang, LetPar)):
        new = out.binder + suffix
        out = dataclasses.replace(out, binder=new, body=rename(out.body, m.binder, new))
    return out


def test_weight_invariant_under_alpha_renaming():
    for f in corpus_files():
        p = load(f)
        q = dataclasses.replace(p, main=_rename_binders(p.main, "_a"))
        assert q.main != p.main or not any(isinstance(t, Lam) for t in subterms(p.main))
        assert alpha_eq(p.main, q.main)
        assert infer_weight(check(q).derivation).elem == infer_weight(check(p).derivation).elem


@pytest.mark.parametrize("family", sorted(FAMILIES))
@pytest.mark.parametrize("d", [1, 2, 3])
def test_degree_constant_within_family(family, d):
    degrees = {infer_weight(check(FAMILIES[family](d, s)).derivation).elem.f.degree
               for s in range(1, 40, 7)}
    assert len(degrees) == 1


def test_corpus_bounds_hold():
    for f in corpus_files():
        r = verify(load(f))
        assert r.ok, r


def test_random_programs_within_bounds():
    rng = random.Random(SEED)
    for _ in range(300):
        r = verify(random_program(rng))
        assert r.ok, r


def test_saturation_along_traces():
    rng = random.Random(SEED)
    for _ in range(150):
        p = random_program(rng)
        w = infer_weight(check(p).derivation).elem
        tr = trace(erase(p.main))
        assert saturation_counterexamples(tr, w, [random_elem(rng) for _ in range(3)]) == []
