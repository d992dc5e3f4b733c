"""Replay a derivation tree against the typing rules, node by node.

Independent of the checker: it only looks at what each node claims (rule,
depth, context, term, type, contractions) and at its children.
"""

from __future__ import annotations

from collections import Counter

from .syntax import (App, Arith, Bang, Fold, Get, IntLit, Lam, LetBang, LetPar,
                     Par, RegionConst, Set, UnitVal, Unfold, Var, is_value,
                     free_occurrences)
from .types import (BangT, Lolli, Mu, NatT, ParT, RegT, UnitT, alpha_eq, unroll)
from .typesystem import BANG, LAM, PAR, CtxEntry, Derivation, RegionContext

ARITY = {"v": 0, "u": 0, "int": 0, "r": 0, "arith": 2, "lam": 1, "app": 2,
         "bang-prom": 1, "par-prom": 1, "bang-elim": 2, "par-elim": 2,
         "get": 1, "set": 2, "fold": 1, "unfold": 1}


class InvalidDerivation(Exception):
    def __init__(self, node: Derivation, why: str):
        super().__init__(f"{node.rule} node at depth {node.delta}: {why}")
        self.node = node


def _ctx_map(ctx) -> dict[str, CtxEntry]:
    names = [e.name for e in ctx]
    if len(set(names)) != len(names):
        raise ValueError("duplicate context entry")
    return {e.name: e for e in ctx}


def _expect(cond: bool, node: Derivation, why: str):
    if not cond:
        raise InvalidDerivation(node, why)


def _combine(node: Derivation, parts) -> int:
    """Check ``node.ctx`` is the union of ``parts``; return merges performed."""
    want = _ctx_map(node.ctx)
    uses: Counter = Counter()
    count: Counter = Counter()
    for part in parts:
        for e in part:
            _expect(e.name in want, node, f"{e.name} missing from the conclusion")
            w = want[e.name]
            _expect(w.usage == e.usage and alpha_eq(w.type, e.type), node,
                    f"{e.name} changes usage or type")
            uses[e.name] += e.uses
            count[e.name] += 1
    _expect(set(uses) == set(want), node, "conclusion mentions unused variables")
    merges = 0
    for x, w in want.items():
        _expect(uses[x] == w.uses, node, f"use count of {x} does not add up")
        if count[x] > 1:
            if w.usage == BANG:
                merges += count[x] - 1
            else:
                _expect(w.usage == LAM and w.shared, node, f"{x} cannot be contracted")
    return merges


def validate(d: Derivation, regions: RegionContext) -> None:
    """Raise :class:`InvalidDerivation` at the first node that breaks its rule."""
    for node in d.nodes():
        _node(node, regions)


def _node(n: Derivation, regions: RegionContext) -> None:
    rule, m, ch = n.rule, n.term, n.children
    _expect(rule in ARITY, n, f"unknown rule {rule!r}")
    _expect(len(ch) == ARITY[rule], n, "wrong number of premises")
    _expect(n.delta >= 0, n, "negative depth index")
    same_depth = rule not in ("bang-prom", "par-prom")
    for c in ch:
        if same_depth:
            _expect(c.delta == n.delta, n, "premise depth differs")
        else:
            _expect(c.delta == n.delta - 1, n, "promotion premise must sit one level down")
    expected_k = 0

    if rule == "v":
        _expect(isinstance(m, Var), n, "term is not a variable")
        _expect(len(n.ctx) == 1 and n.ctx[0].name == m.name and n.ctx[0].usage == LAM
                and n.ctx[0].uses == 1 and alpha_eq(n.ctx[0].type, n.type), n, "bad axiom context")
    elif rule in ("u", "int"):
        _expect(isinstance(m, UnitVal if rule == "u" else IntLit), n, "wrong literal")
        _expect(isinstance(n.type, UnitT if rule == "u" else NatT), n, "wrong literal type")
        _expect(not n.ctx, n, "literal with nonempty context")
    elif rule == "r":
        _expect(isinstance(m, RegionConst) and m.region in regions, n, "unknown region")
        d, a = regions[m.region]
        _expect(d == n.delta, n, "region accessed at the wrong depth")
        _expect(alpha_eq(n.type, RegT(m.region, a)), n, "region constant type")
        _expect(not n.ctx, n, "region constant with nonempty context")
    elif rule == "arith":
        _expect(isinstance(m, Arith) and ch[0].term == m.left and ch[1].term == m.right, n, "shape")
        _expect(all(isinstance(c.type, NatT) for c in ch) and isinstance(n.type, NatT), n, "needs Nat")
        expected_k = _combine(n, [ch[0].ctx, ch[1].ctx])
    elif rule == "lam":
        _expect(isinstance(m, Lam) and ch[0].term == m.body, n, "shape")
        _expect(alpha_eq(n.type, Lolli(m.annotation, ch[0].type)), n, "lambda type")
        body = _ctx_map(ch[0].ctx)
        if m.binder in body:
            e = body.pop(m.binder)
            _expect(e.usage == LAM and e.uses == 1 and not e.shared
                    and alpha_eq(e.type, m.annotation), n, "binder used non-affinely")
        expected_k = _combine(n, [tuple(body.values())])
    elif rule == "app":
        _expect(isinstance(m, App) and ch[0].term == m.fn and ch[1].term == m.arg, n, "shape")
        _expect(alpha_eq(ch[0].type, Lolli(ch[1].type, n.type)), n, "application types")
        expected_k = _combine(n, [ch[0].ctx, ch[1].ctx])
    elif rule in ("bang-prom", "par-prom"):
        bang = rule == "bang-prom"
        _expect(isinstance(m, Bang if bang else Par) and ch[0].term == m.body, n, "shape")
        _expect(alpha_eq(n.type, (BangT if bang else ParT)(ch[0].type)), n, "promotion type")
        inner = _ctx_map(ch[0].ctx)
        outer = _ctx_map(n.ctx)
        _expect(set(inner) == set(outer), n, "promotion changes the variables")
        if bang:
            _expect(is_value(m.body), n, "! promotes a non-value")
            _expect(sum(free_occurrences(m.body).values()) <= 1, n, "too many free occurrences")
        for x, e in inner.items():
            o = outer[x]
            _expect(e.usage == LAM and alpha_eq(e.type, o.type) and e.uses == o.uses, n,
                    f"{x} must be λ inside the box")
            if o.usage == PAR:
                _expect(not bang and e.uses == 1 and not e.shared, n, f"{x} is a $-variable")
            else:
                _expect(o.usage == BANG, n, f"{x} cannot enter a box")
                expected_k += e.uses - 1
    elif rule in ("bang-elim", "par-elim"):
        bang = rule == "bang-elim"
        _expect(isinstance(m, LetBang if bang else LetPar), n, "shape")
        _expect(ch[0].term == m.bound and ch[1].term == m.body and is_value(m.bound), n, "shape")
        _expect(isinstance(ch[0].type, BangT if bang else ParT), n, "bound has the wrong modality")
        _expect(alpha_eq(n.type, ch[1].type), n, "let type")
        body = _ctx_map(ch[1].ctx)
        if m.binder in body:
            e = body.pop(m.binder)
            _expect(e.usage == (BANG if bang else PAR) and alpha_eq(e.type, ch[0].type.body), n,
                    "binder usage")
        expected_k = _combine(n, [ch[0].ctx, tuple(body.values())])
    elif rule == "get":
        _expect(isinstance(m, Get) and ch[0].rule == "r" and ch[0].term == RegionConst(m.region), n, "shape")
        _expect(alpha_eq(ch[0].type, RegT(m.region, n.type)), n, "get type")
        _expect(not n.ctx, n, "get with nonempty context")
    elif rule == "set":
        _expect(isinstance(m, Set) and ch[0].rule == "r" and ch[0].term == RegionConst(m.region), n, "shape")
        _expect(ch[1].term == m.payload, n, "shape")
        _expect(alpha_eq(ch[0].type, RegT(m.region, ch[1].type)), n, "payload type")
        _expect(isinstance(n.type, UnitT), n, "set has type Unit")
        expected_k = _combine(n, [ch[1].ctx])
    elif rule == "fold":
        _expect(isinstance(m, Fold) and ch[0].term == m.body, n, "shape")
        _expect(isinstance(n.type, Mu) and alpha_eq(n.type, m.annotation), n, "fold annotation")
        _expect(alpha_eq(ch[0].type, unroll(n.type)), n, "fold body type")
        expected_k = _combine(n, [ch[0].ctx])
    elif rule == "unfold":
        _expect(isinstance(m, Unfold) and ch[0].term == m.body, n, "shape")
        _expect(isinstance(ch[0].type, Mu) and alpha_eq(n.type, unroll(ch[0].type)), n, "unfold type")
        expected_k = _combine(n, [ch[0].ctx])

    _expect(n.contractions == expected_k, n,
            f"records {n.contractions} contractions, rule implies {expected_k}")
