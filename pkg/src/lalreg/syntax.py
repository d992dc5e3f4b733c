"""Abstract syntax, parser, pretty-printer and structural measures."""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .types import (BangT, Lolli, Mu, NatT, ParT, RegT, TVar, Type, UnitT,
                    show_type)


# -- terms ---------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Lam:
    binder: str
    annotation: Type
    body: Term


@dataclass(frozen=True, slots=True)
class RegionConst:
    region: str


@dataclass(frozen=True, slots=True)
class UnitVal:
    pass


@dataclass(frozen=True, slots=True)
class IntLit:
    n: int


@dataclass(frozen=True, slots=True)
class Arith:
    op: str
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Bang:
    body: Term


@dataclass(frozen=True, slots=True)
class Par:
    body: Term


@dataclass(frozen=True, slots=True)
class App:
    fn: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class LetBang:
    binder: str
    bound: Term
    body: Term


@dataclass(frozen=True, slots=True)
class LetPar:
    binder: str
    bound: Term
    body: Term


@dataclass(frozen=True, slots=True)
class Get:
    region: str


@dataclass(frozen=True, slots=True)
class Set:
    region: str
    payload: Term


@dataclass(frozen=True, slots=True)
class Fold:
    annotation: Type
    body: Term


@dataclass(frozen=True, slots=True)
class Unfold:
    body: Term


Term = Union[Var, Lam, RegionConst, UnitVal, IntLit, Arith, Bang, Par, App,
             LetBang, LetPar, Get, Set, Fold, Unfold]

UNIT_VAL = UnitVal()
ARITH_OPS = ("+", "-", "*")


def arith(op: str, a: int, b: int) -> int:
    if op == "+":
        return a + b
    if op == "-":
        return max(0, a - b)
    if op == "*":
        return a * b
    raise ValueError(f"unknown arithmetic operator {op!r}")


def is_value(m: Term) -> bool:
    while isinstance(m, (Bang, Par)):
        m = m.body
    return isinstance(m, (Var, Lam, RegionConst, UnitVal, IntLit))


@dataclass(frozen=True)
class RegionDecl:
    name: str
    depth: int
    content: Type


@dataclass(frozen=True)
class Program:
    regions: tuple[RegionDecl, ...]
    main: Term
    level: Optional[int] = None
    name: str = field(default="<program>", compare=False)

    def __post_init__(self):
        names = [r.name for r in self.regions]
        dup = [n for n, c in Counter(names).items() if c > 1]
        if dup:
            raise ValueError(f"duplicate region declaration: {dup[0]}")

    @property
    def region_map(self) -> dict[str, tuple[int, Type]]:
        return {r.name: (r.depth, r.content) for r in self.regions}

    @property
    def top_level(self) -> int:
        if self.level is not None:
            return self.level
        return max([depth(self.main)] + [r.depth for r in self.regions])


# -- structural measures ------------------------------------------------------

def children(m: Term) -> tuple[Term, ...]:
    if isinstance(m, (Lam, Bang, Par, Fold, Unfold)):
        return (m.body,)
    if isinstance(m, Arith):
        return (m.left, m.right)
    if isinstance(m, App):
        return (m.fn, m.arg)
    if isinstance(m, (LetBang, LetPar)):
        return (m.bound, m.body)
    if isinstance(m, Set):
        return (m.payload,)
    return ()


def subterms(m: Term) -> Iterator[Term]:
    stack = [m]
    while stack:
        t = stack.pop()
        yield t
        stack.extend(reversed(children(t)))


def depth(m: Term) -> int:
    """Maximum number of ``!``/``$`` constructors above any occurrence."""
    best = 0
    stack = [(m, 0)]
    while stack:
        t, d = stack.pop()
        if isinstance(t, (Bang, Par)):
            d += 1
        best = max(best, d)
        for c in children(t):
            stack.append((c, d))
    return best


def size(m: Term) -> int:
    return sum(1 for _ in subterms(m))


def free_vars(m: Term) -> frozenset[str]:
    return frozenset(free_occurrences(m))


def free_occurrences(m: Term) -> Counter:
    """Multiset of free variable occurrences."""
    out: Counter = Counter()

    def go(t: Term, bound: frozenset[str]):
        if isinstance(t, Var):
            if t.name not in bound:
                out[t.name] += 1
        elif isinstance(t, Lam):
            go(t.body, bound | {t.binder})
        elif isinstance(t, (LetBang, LetPar)):
            go(t.bound, bound)
            go(t.body, bound | {t.binder})
        else:
            for c in children(t):
                go(c, bound)

    go(m, frozenset())
    return out


def occurrences(x: str, m: Term) -> int:
    return free_occurrences(m)[x]


def _fresh(base: str, avoid: set[str]) -> str:
    stem = base.rstrip("0123456789'") or "v"
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def all_names(m: Term) -> set[str]:
    names = set()
    for t in subterms(m):
        if isinstance(t, Var):
            names.add(t.name)
        elif isinstance(t, (Lam, LetBang, LetPar)):
            names.add(t.binder)
    return names


def subst(m: Term, x: str, v: Term) -> Term:
    """Capture-avoiding ``m[v/x]``."""
    fv = free_vars(v)

    def go(t: Term) -> Term:
        if isinstance(t, Var):
            return v if t.name == x else t
        if isinstance(t, (RegionConst, UnitVal, IntLit, Get)):
            return t
        if isinstance(t, Lam):
            if t.binder == x:
                return t
            binder, body = _rebind(t.binder, t.body)
            return Lam(binder, t.annotation, go(body))
        if isinstance(t, (LetBang, LetPar)):
            bound = go(t.bound)
            if t.binder == x:
                return type(t)(t.binder, bound, t.body)
            binder, body = _rebind(t.binder, t.body)
            return type(t)(binder, bound, go(body))
        if isinstance(t, Arith):
            return Arith(t.op, go(t.left), go(t.right))
        if isinstance(t, App):
            return App(go(t.fn), go(t.arg))
        if isinstance(t, Bang):
            return Bang(go(t.body))
        if isinstance(t, Par):
            return Par(go(t.body))
        if isinstance(t, Set):
            return Set(t.region, go(t.payload))
        if isinstance(t, Fold):
            return Fold(t.annotation, go(t.body))
        if isinstance(t, Unfold):
            return Unfold(go(t.body))
        raise TypeError(f"not a term: {t!r}")

    def _rebind(binder: str, body: Term) -> tuple[str, Term]:
        if binder not in fv or x not in free_vars(body):
            return binder, body
        fresh = _fresh(binder, all_names(body) | fv | {x})
        return fresh, rename(body, binder, fresh)

    return go(m)


def rename(m: Term, old: str, new: str) -> Term:
    return subst(m, old, Var(new))


def alpha_eq(a: Term, b: Term) -> bool:
    return _canon(a) == _canon(b)


def _canon(m: Term) -> Term:
    """Rename binders to positional names (de Bruijn-style levels)."""
    counter = itertools.count()

    def go(t: Term, env: dict[str, str]) -> Term:
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        if isinstance(t, Lam):
            n = f"#{next(counter)}"
            return Lam(n, t.annotation, go(t.body, {**env, t.binder: n}))
        if isinstance(t, (LetBang, LetPar)):
            bound = go(t.bound, env)
            n = f"#{next(counter)}"
            return type(t)(n, bound, go(t.body, {**env, t.binder: n}))
        if isinstance(t, Arith):
            return Arith(t.op, go(t.left, env), go(t.right, env))
        if isinstance(t, App):
            return App(go(t.fn, env), go(t.arg, env))
        if isinstance(t, (Bang, Par, Unfold)):
            return type(t)(go(t.body, env))
        if isinstance(t, Fold):
            return Fold(t.annotation, go(t.body, env))
        if isinstance(t, Set):
            return Set(t.region, go(t.payload, env))
        return t

    return go(m, {})


# -- pretty printing ----------------------------------------------------------
# precedence: 0 binders, 1 arithmetic, 2 application, 3 prefix, 4 atoms

def show(m: Term, prec: int = 0) -> str:
    if isinstance(m, Var):
        return m.name
    if isinstance(m, RegionConst):
        return f"@{m.region}"
    if isinstance(m, UnitVal):
        return "()"
    if isinstance(m, IntLit):
        return str(m.n)
    if isinstance(m, Get):
        return f"get({m.region})"
    if isinstance(m, Set):
        return f"set({m.region}, {show(m.payload)})"
    if isinstance(m, Lam):
        s = f"\\{m.binder}:{show_type(m.annotation)}. {show(m.body)}"
    elif isinstance(m, LetBang):
        s = f"let !{m.binder} = {show(m.bound)} in {show(m.body)}"
    elif isinstance(m, LetPar):
        s = f"let ${m.binder} = {show(m.bound)} in {show(m.body)}"
    elif isinstance(m, Arith):
        s = f"{show(m.left, 2)} {m.op} {show(m.right, 2)}"
        return f"({s})" if prec > 1 else s
    elif isinstance(m, App):
        s = f"{show(m.fn, 2)} {show(m.arg, 3)}"
        return f"({s})" if prec > 2 else s
    elif isinstance(m, Bang):
        return "!" + show(m.body, 3)
    elif isinstance(m, Par):
        return "$" + show(m.body, 3)
    elif isinstance(m, Fold):
        return f"fold[{show_type(m.annotation)}] " + show(m.body, 3)
    elif isinstance(m, Unfold):
        return "unfold " + show(m.body, 3)
    else:
        raise TypeError(f"not a term: {m!r}")
    return f"({s})" if prec > 0 else s


def show_program(p: Program) -> str:
    lines = []
    if p.level is not None:
        lines.append(f"level {p.level} ;")
    for r in p.regions:
        lines.append(f"region {r.name} : depth {r.depth}, type {show_type(r.content)} ;")
    lines.append(show(p.main))
    return "\n".join(lines) + "\n"


# -- parsing -------------------------------------------------------------------

class LalSyntaxError(Exception):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class ValueExpected(LalSyntaxError):
    pass


KEYWORDS = {"let", "in", "get", "set", "fold", "unfold", "mu", "region",
            "depth", "type", "level", "Unit", "Nat", "Reg"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<lolli>-o(?![A-Za-z0-9_']))
  | (?P<int>[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[\\:.!$=();,+\-*\[\]@])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(source):
        mo = _TOKEN_RE.match(source, pos)
        if mo is None:
            raise LalSyntaxError(line, col, f"unexpected character {source[pos]!r}")
        kind, text = mo.lastgroup, mo.group()
        if kind != "ws":
            if kind == "name" and text in KEYWORDS:
                kind = "kw"
            toks.append(Token(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = mo.end()
    toks.append(Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0
        self.seq_names = itertools.count()

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "kw", "lolli") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, msg: str, tok: Optional[Token] = None):
        t = tok or self.tok
        raise LalSyntaxError(t.line, t.col, msg)

    def name(self) -> str:
        if self.tok.kind != "name":
            self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        return self.advance().text

    def natural(self) -> int:
        if self.tok.kind != "int":
            self.error(f"expected a natural number, found {self.tok.text or 'end of input'!r}")
        return int(self.advance().text)

    # program
    def program(self) -> Program:
        regions, level = [], None
        while self.at("region") or self.at("level"):
            if self.advance().text == "level":
                if level is not None:
                    self.error("duplicate level header")
                level = self.natural()
            else:
                start = self.toks[self.i - 1]
                name = self.name()
                self.expect(":")
                self.expect("depth")
                d = self.natural()
                self.expect(",")
                self.expect("type")
                a = self.type_()
                if any(r.name == name for r in regions):
                    self.error(f"duplicate region declaration {name!r}", start)
                regions.append(RegionDecl(name, d, a))
            self.expect(";")
        main = self.term()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return Program(tuple(regions), main, level)

    # types
    def type_(self) -> Type:
        if self.at("mu"):
            self.advance()
            x = self.name()
            self.expect(".")
            return Mu(x, self.type_())
        dom = self.type_prefix()
        if self.tok.kind == "lolli":
            self.advance()
            return Lolli(dom, self.type_())
        return dom

    def type_prefix(self) -> Type:
        if self.at("!"):
            self.advance()
            return BangT(self.type_prefix())
        if self.at("$"):
            self.advance()
            return ParT(self.type_prefix())
        if self.at("Reg"):
            self.advance()
            self.expect("[")
            r = self.name()
            self.expect("]")
            return RegT(r, self.type_prefix())
        return self.type_atom()

    def type_atom(self) -> Type:
        if self.at("Unit"):
            self.advance()
            return UnitT()
        if self.at("Nat"):
            self.advance()
            return NatT()
        if self.at("("):
            self.advance()
            a = self.type_()
            self.expect(")")
            return a
        if self.tok.kind == "name":
            return TVar(self.advance().text)
        self.error(f"expected a type, found {self.tok.text or 'end of input'!r}")

    # terms
    def term(self) -> Term:
        first = self.expr()
        if self.at(";"):
            self.advance()
            rest = self.term()
            z = self.fresh_seq(rest)
            return App(Lam(z, UnitT(), rest), first)
        return first

    def fresh_seq(self, body: Term) -> str:
        taken = free_vars(body)
        while True:
            z = f"_s{next(self.seq_names)}"
            if z not in taken:
                return z

    def value(self) -> Term:
        start = self.tok
        v = self.term()
        if not is_value(v):
            raise ValueExpected(start.line, start.col, f"expected a value, found {show(v)}")
        return v

    def expr(self) -> Term:
        if self.at("\\"):
            self.advance()
            x = self.name()
            self.expect(":")
            a = self.type_()
            self.expect(".")
            return Lam(x, a, self.term())
        if self.at("let"):
            self.advance()
            if self.at("!"):
                ctor = LetBang
            elif self.at("$"):
                ctor = LetPar
            else:
                self.error("expected '!' or '$' after let")
            self.advance()
            x = self.name()
            self.expect("=")
            v = self.value()
            self.expect("in")
            return ctor(x, v, self.term())
        return self.arith()

    def arith(self) -> Term:
        start = self.tok
        left = self.app()
        if self.tok.kind == "sym" and self.tok.text in ARITH_OPS:
            op = self.advance().text
            rstart = self.tok
            right = self.app()
            if not is_value(left):
                raise ValueExpected(start.line, start.col,
                                    f"arithmetic operand must be a value, found {show(left)}")
            if not is_value(right):
                raise ValueExpected(rstart.line, rstart.col,
                                    f"arithmetic operand must be a value, found {show(right)}")
            node = Arith(op, left, right)
            if self.tok.kind == "sym" and self.tok.text in ARITH_OPS:
                raise ValueExpected(start.line, start.col,
                                    f"arithmetic operand must be a value, found {show(node)}")
            return node
        return left

    def starts_prefix(self) -> bool:
        t = self.tok
        if t.kind in ("name", "int"):
            return True
        if t.kind == "sym" and t.text in ("!", "$", "(", "@"):
            return True
        return t.kind == "kw" and t.text in ("get", "set", "fold", "unfold")

    def app(self) -> Term:
        m = self.prefix()
        while self.starts_prefix():
            m = App(m, self.prefix())
        return m

    def prefix(self) -> Term:
        if self.at("!"):
            self.advance()
            return Bang(self.prefix())
        if self.at("$"):
            self.advance()
            return Par(self.prefix())
        if self.at("fold"):
            self.advance()
            self.expect("[")
            a = self.type_()
            self.expect("]")
            return Fold(a, self.prefix())
        if self.at("unfold"):
            self.advance()
            return Unfold(self.prefix())
        return self.atom()

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "name":
            self.advance()
            return Var(t.text)
        if t.kind == "int":
            self.advance()
            return IntLit(int(t.text))
        if self.at("@"):
            self.advance()
            return RegionConst(self.name())
        if self.at("get"):
            self.advance()
            self.expect("(")
            r = self.name()
            self.expect(")")
            return Get(r)
        if self.at("set"):
            self.advance()
            self.expect("(")
            r = self.name()
            self.expect(",")
            v = self.value()
            self.expect(")")
            return Set(r, v)
        if self.at("("):
            self.advance()
            if self.at(")"):
                self.advance()
                return UnitVal()
            m = self.term()
            self.expect(")")
            return m
        self.error(f"expected a term, found {t.text or 'end of input'!r}")


def parse(source: str, name: str = "<program>") -> Program:
    prog = _Parser(source).program()
    return Program(prog.regions, prog.main, prog.level, name)


def parse_term(source: str) -> Term:
    p = _Parser(source)
    m = p.term()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return m


def parse_type(source: str) -> Type:
    p = _Parser(source)
    a = p.type_()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return a
