"""Depth-indexed affine type checking.

The checker is syntax-directed: lambda binders are annotated, fold/unfold are
explicit, weakening is implicit and contraction is implicit for ``!``-usage
variables only.  Every accepted program yields a :class:`Derivation` whose
nodes record the rule used, the judgment and the number of contractions
performed at that node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional

from .syntax import (App, Arith, Bang, Fold, Get, IntLit, Lam, LetBang, LetPar,
                     Par, Program, RegionConst, Set, Term, UnitVal, Unfold, Var,
                     children, free_occurrences, is_value, show)
from .types import (NAT, UNIT, BangT, Lolli, Mu, NatT, ParT, RegT, Type, alpha_eq,
                    is_guarded, show_type, subterms, unroll)

LAM, PAR, BANG = "lam", "par", "bang"
USAGE_SYMBOL = {LAM: "λ", PAR: "$", BANG: "!"}

RegionContext = Mapping[str, tuple[int, Type]]


# -- errors ----------------------------------------------------------------------

class TypingError(Exception):
    def __init__(self, message: str, term: Optional[Term] = None):
        if term is not None:
            message = f"{message} in {show(term)}"
        super().__init__(message)
        self.term = term

    @property
    def variant(self) -> str:
        return type(self).__name__


class UsageViolation(TypingError):
    pass


class UnboundVariable(UsageViolation):
    pass


class DepthMismatch(TypingError):
    pass


class NonValueUnderBang(TypingError):
    pass


class TooManyFreeVarsUnderBang(TypingError):
    pass


class UnguardedMu(TypingError):
    pass


class NegativeDepth(TypingError):
    pass


class Mismatch(TypingError):
    def __init__(self, expected: str, found: Type, term: Optional[Term] = None):
        super().__init__(f"expected {expected}, found {show_type(found)}", term)
        self.expected = expected
        self.found = found


class ValueRequired(Mismatch):
    """A position the grammar restricts to values holds a computation.

    Only reachable for syntax trees built in code; the parser already refuses them.
    """

    def __init__(self, where: str, term: Term):
        TypingError.__init__(self, f"expected a value as {where}, found {show(term)}")
        self.expected = "a value"
        self.found = None
        self.term = term

    @property
    def variant(self) -> str:
        return "Mismatch"


class WFError(TypingError):
    pass


class UnknownRegion(WFError):
    def __init__(self, region: str):
        super().__init__(f"unknown region {region}")
        self.region = region


class RegionTypeMismatch(WFError):
    def __init__(self, region: str, expected: Type, found: Type):
        super().__init__(f"region {region} holds {show_type(expected)}, "
                         f"but the type mentions Reg[{region}] {show_type(found)}")
        self.region = region
        self.expected = expected
        self.found = found


class RegionNotParagraph(WFError):
    pass


# -- well-formedness -----------------------------------------------------------------

def wf_type(regions: RegionContext, a: Type) -> None:
    """Raise :class:`WFError` unless every ``Reg[r] B`` in ``a`` matches ``regions``."""
    for t in subterms(a):
        if isinstance(t, RegT):
            if t.region not in regions:
                raise UnknownRegion(t.region)
            expected = regions[t.region][1]
            if not alpha_eq(expected, t.content):
                raise RegionTypeMismatch(t.region, expected, t.content)


def check_guarded(a: Type) -> None:
    for t in subterms(a):
        if isinstance(t, Mu) and not is_guarded(t.var, t.body):
            raise UnguardedMu(f"{t.var} is not guarded by a modality in {show_type(t)}")


def check_regions(regions: RegionContext) -> None:
    for r, (d, a) in regions.items():
        if d < 0:
            raise NegativeDepth(f"region {r} declared at negative depth {d}")
        check_guarded(a)
        if not isinstance(a, ParT):
            raise RegionNotParagraph(f"region {r} must hold a $-type, found {show_type(a)}")
        wf_type(regions, a)


# -- derivations -------------------------------------------------------------------

@dataclass(frozen=True)
class CtxEntry:
    name: str
    usage: str
    type: Type
    uses: int = 1
    # a lam entry standing for renamed copies of a !-variable, merged at the
    # enclosing promotion
    shared: bool = False

    def __str__(self):
        s = f"{self.name}:({USAGE_SYMBOL[self.usage]},{show_type(self.type)})"
        return s if self.uses == 1 else f"{s}x{self.uses}"


@dataclass(frozen=True)
class Derivation:
    rule: str
    delta: int
    ctx: tuple[CtxEntry, ...]
    term: Term
    type: Type
    children: tuple[Derivation, ...] = ()
    contractions: int = 0

    def judgment(self, regions: RegionContext | None = None) -> str:
        gamma = ", ".join(str(e) for e in self.ctx)
        head = ""
        if regions:
            head = ", ".join(f"{r}:({d},{show_type(a)})" for r, (d, a) in regions.items()) + "; "
        lhs = f"{head}{gamma} " if gamma else head
        return f"{lhs}⊢^{self.delta} {show(self.term)} : {show_type(self.type)}"

    def nodes(self) -> Iterator[Derivation]:
        stack = [self]
        while stack:
            d = stack.pop()
            yield d
            stack.extend(reversed(d.children))

    @property
    def total_contractions(self) -> int:
        return sum(d.contractions for d in self.nodes())

    def dump(self) -> str:
        lines = []

        def go(d: Derivation, indent: int):
            gamma = ", ".join(str(e) for e in d.ctx)
            lines.append(f"{'  ' * indent}{d.rule} | depth {d.delta} | {gamma} ⊢ "
                         f"{show(d.term)} : {show_type(d.type)} | contractions {d.contractions}")
            for c in d.children:
                go(c, indent + 1)

        go(self, 0)
        return "\n".join(lines)


@dataclass(frozen=True)
class Checked:
    program: Program
    derivation: Derivation
    regions: Mapping[str, tuple[int, Type]] = field(repr=False)
    level: int = 0

    @property
    def judgment(self) -> str:
        return self.derivation.judgment(self.regions)


# -- the checker ---------------------------------------------------------------------

@dataclass(frozen=True)
class _Binding:
    usage: str
    type: Type
    shared: bool = False
    hidden: Optional[str] = None


def _enter_box(env: dict[str, _Binding], bang: bool) -> dict[str, _Binding]:
    inner = {}
    for x, b in env.items():
        if b.hidden is not None:
            inner[x] = _Binding(b.usage, b.type, hidden=f"{x} is used more than one modality below its binder")
        elif b.usage == BANG:
            inner[x] = _Binding(LAM, b.type, shared=True)
        elif b.usage == PAR and not bang:
            inner[x] = _Binding(LAM, b.type)
        elif b.usage == PAR:
            inner[x] = _Binding(b.usage, b.type, hidden=f"$-variable {x} is used under !")
        else:
            inner[x] = _Binding(b.usage, b.type, hidden=f"λ-variable {x} is used under a modality")
    return inner


class _Checker:
    def __init__(self, regions: RegionContext):
        self.regions = regions

    def merge(self, term: Term, env: dict[str, _Binding],
              parts: list[tuple[CtxEntry, ...]]) -> tuple[tuple[CtxEntry, ...], int]:
        merged: dict[str, CtxEntry] = {}
        seen_in: dict[str, int] = {}
        for ctx in parts:
            for e in ctx:
                if e.name in merged:
                    old = merged[e.name]
                    merged[e.name] = CtxEntry(e.name, e.usage, e.type, old.uses + e.uses, e.shared)
                    seen_in[e.name] += 1
                else:
                    merged[e.name] = e
                    seen_in[e.name] = 1
        contractions = 0
        for x, k in seen_in.items():
            if k < 2:
                continue
            e = merged[x]
            if e.usage == BANG:
                contractions += k - 1
            elif not e.shared:
                what = "λ" if e.usage == LAM else "$"
                raise UsageViolation(f"{what}-variable {x} is used more than once", term)
        return tuple(merged[x] for x in sorted(merged)), contractions

    def check(self, m: Term, env: dict[str, _Binding], delta: int) -> Derivation:
        if isinstance(m, Var):
            b = env.get(m.name)
            if b is None:
                raise UnboundVariable(f"unbound variable {m.name}", m)
            if b.hidden is not None:
                raise UsageViolation(b.hidden)
            if b.usage != LAM:
                where = "inside a $-box" if b.usage == PAR else "inside a !- or $-box"
                raise UsageViolation(f"{USAGE_SYMBOL[b.usage]}-variable {m.name} must be used {where}")
            return Derivation("v", delta, (CtxEntry(m.name, LAM, b.type, 1, b.shared),), m, b.type)

        if isinstance(m, UnitVal):
            return Derivation("u", delta, (), m, UNIT)

        if isinstance(m, IntLit):
            return Derivation("int", delta, (), m, NAT)

        if isinstance(m, RegionConst):
            return self.region_node(m, m.region, delta)

        if isinstance(m, Arith):
            left = self.check(m.left, env, delta)
            right = self.check(m.right, env, delta)
            for side in (left, right):
                if not isinstance(side.type, NatT):
                    raise Mismatch("Nat", side.type, side.term)
            ctx, k = self.merge(m, env, [left.ctx, right.ctx])
            return Derivation("arith", delta, ctx, m, NAT, (left, right), k)

        if isinstance(m, Lam):
            wf_type(self.regions, m.annotation)
            inner = dict(env)
            inner[m.binder] = _Binding(LAM, m.annotation)
            body = self.check(m.body, inner, delta)
            ctx = tuple(e for e in body.ctx if e.name != m.binder)
            return Derivation("lam", delta, ctx, m, Lolli(m.annotation, body.type), (body,))

        if isinstance(m, App):
            fn = self.check(m.fn, env, delta)
            arg = self.check(m.arg, env, delta)
            if not isinstance(fn.type, Lolli):
                raise Mismatch("a function type", fn.type, m.fn)
            if not alpha_eq(fn.type.dom, arg.type):
                raise Mismatch(show_type(fn.type.dom), arg.type, m.arg)
            ctx, k = self.merge(m, env, [fn.ctx, arg.ctx])
            return Derivation("app", delta, ctx, m, fn.type.cod, (fn, arg), k)

        if isinstance(m, (Bang, Par)):
            bang = isinstance(m, Bang)
            if bang:
                self.bang_side_conditions(m)
            if delta - 1 < 0:
                raise NegativeDepth(f"promotion at depth {delta} leaves a negative depth index", m)
            inner = self.check(m.body, _enter_box(env, bang), delta - 1)
            ctx, k = [], 0
            for e in inner.ctx:
                outer = env[e.name]
                if outer.usage == BANG:
                    k += e.uses - 1
                ctx.append(CtxEntry(e.name, outer.usage, e.type, e.uses, outer.shared))
            if bang:
                return Derivation("bang-prom", delta, tuple(ctx), m, BangT(inner.type), (inner,), k)
            return Derivation("par-prom", delta, tuple(ctx), m, ParT(inner.type), (inner,), k)

        if isinstance(m, (LetBang, LetPar)):
            bang = isinstance(m, LetBang)
            bound = self.check(m.bound, env, delta)
            want = BangT if bang else ParT
            if not isinstance(bound.type, want):
                raise Mismatch("a !-type" if bang else "a $-type", bound.type, m.bound)
            inner = dict(env)
            inner[m.binder] = _Binding(BANG if bang else PAR, bound.type.body)
            body = self.check(m.body, inner, delta)
            body_ctx = tuple(e for e in body.ctx if e.name != m.binder)
            ctx, k = self.merge(m, env, [bound.ctx, body_ctx])
            rule = "bang-elim" if bang else "par-elim"
            return Derivation(rule, delta, ctx, m, body.type, (bound, body), k)

        if isinstance(m, Get):
            r = self.region_node(m, m.region, delta)
            return Derivation("get", delta, (), m, r.type.content, (r,))

        if isinstance(m, Set):
            r = self.region_node(m, m.region, delta)
            payload = self.check(m.payload, env, delta)
            if not alpha_eq(r.type.content, payload.type):
                raise Mismatch(show_type(r.type.content), payload.type, m.payload)
            return Derivation("set", delta, payload.ctx, m, UNIT, (r, payload))

        if isinstance(m, Fold):
            wf_type(self.regions, m.annotation)
            if not isinstance(m.annotation, Mu):
                raise Mismatch("a mu-type annotation", m.annotation, m)
            body = self.check(m.body, env, delta)
            unrolled = unroll(m.annotation)
            if not alpha_eq(unrolled, body.type):
                raise Mismatch(show_type(unrolled), body.type, m.body)
            return Derivation("fold", delta, body.ctx, m, m.annotation, (body,))

        if isinstance(m, Unfold):
            body = self.check(m.body, env, delta)
            if not isinstance(body.type, Mu):
                raise Mismatch("a mu-type", body.type, m.body)
            return Derivation("unfold", delta, body.ctx, m, unroll(body.type), (body,))

        raise TypeError(f"not a term: {m!r}")

    def region_node(self, m: Term, r: str, delta: int) -> Derivation:
        if r not in self.regions:
            raise UnknownRegion(r)
        d, a = self.regions[r]
        if d != delta:
            raise DepthMismatch(f"region {r} lives at depth {d} but is accessed at depth {delta}", m)
        return Derivation("r", delta, (), RegionConst(r), RegT(r, a))

    @staticmethod
    def bang_side_conditions(m: Bang) -> None:
        if not is_value(m.body):
            raise NonValueUnderBang("only values can be promoted with !", m)
        if sum(free_occurrences(m.body).values()) > 1:
            raise TooManyFreeVarsUnderBang("a !-box may contain at most one free variable occurrence", m)


def _structural_prepass(m: Term) -> None:
    stack = [m]
    while stack:
        t = stack.pop()
        if isinstance(t, Bang):
            _Checker.bang_side_conditions(t)
        if isinstance(t, Lam):
            check_guarded(t.annotation)
        if isinstance(t, Fold):
            check_guarded(t.annotation)
        if isinstance(t, Arith):
            for side in (t.left, t.right):
                if not is_value(side):
                    raise ValueRequired("an arithmetic operand", side)
        if isinstance(t, (LetBang, LetPar)) and not is_value(t.bound):
            raise ValueRequired("a let-bound term", t.bound)
        if isinstance(t, Set) and not is_value(t.payload):
            raise ValueRequired("a set payload", t.payload)
        stack.extend(children(t))


def check_term(m: Term, regions: RegionContext | None = None, delta: int = 0) -> Derivation:
    regions = dict(regions or {})
    check_regions(regions)
    _structural_prepass(m)
    return _Checker(regions).check(m, {}, delta)


def check(prog: Program) -> Checked:
    regions = prog.region_map
    check_regions(regions)
    level = prog.top_level
    _structural_prepass(prog.main)
    d = _Checker(regions).check(prog.main, {}, level)
    # every index is checked on the way down; this guards the root
    if any(n.delta < 0 for n in d.nodes()):
        raise NegativeDepth("negative depth index in derivation")
    return Checked(prog, d, regions, level)


def check_store(store: Mapping[str, Iterable[Term]], regions: RegionContext) -> None:
    """Every stored value must type at its region's depth with the region's content type."""
    for r, vs in store.items():
        if r not in regions:
            raise UnknownRegion(r)
        d, a = regions[r]
        for v in vs:
            found = check_term(v, regions, d).type
            if not alpha_eq(found, a):
                raise Mismatch(show_type(a), found, v)


def erase(m: Term) -> Term:
    """Remove fold/unfold coercions; they have no machine rule."""
    if isinstance(m, (Fold, Unfold)):
        return erase(m.body)
    if isinstance(m, Lam):
        return Lam(m.binder, m.annotation, erase(m.body))
    if isinstance(m, Arith):
        return Arith(m.op, erase(m.left), erase(m.right))
    if isinstance(m, App):
        return App(erase(m.fn), erase(m.arg))
    if isinstance(m, Bang):
        return Bang(erase(m.body))
    if isinstance(m, Par):
        return Par(erase(m.body))
    if isinstance(m, (LetBang, LetPar)):
        return type(m)(m.binder, erase(m.bound), erase(m.body))
    if isinstance(m, Set):
        return Set(m.region, erase(m.payload))
    return m
