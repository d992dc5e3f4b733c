"""Generators for well-typed programs: random ones and fixed-depth families.

Random programs are built type-directed so that they check by construction
(the test-suite still runs the checker on every one).  At level ``L`` there
is one region ``r<k> : depth k, type $Nat`` for each ``1 <= k <= L``.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable

from .syntax import (App, Arith, Bang, Get, IntLit, Lam, LetBang, LetPar, Par,
                     Program, RegionDecl, Set, Term, UnitVal, Var)
from .types import NAT, UNIT, ParT, Type

PAR_NAT = ParT(NAT)


class _Gen:
    def __init__(self, rng: random.Random, level: int):
        self.rng = rng
        self.level = level
        self._names = itertools.count()

    def fresh(self, base: str) -> str:
        return f"{base}{next(self._names)}"

    def lit(self) -> IntLit:
        return IntLit(self.rng.randint(0, 9))

    def op(self) -> str:
        return self.rng.choice("+-*")

    def seq(self, first: Term, rest: Term) -> Term:
        return App(Lam(self.fresh("_q"), UNIT, rest), first)

    def set_get(self, d: int, body: Term) -> Term:
        """``set(r, $k); (\\w:$Nat. body) get(r)`` on the region at depth ``d``."""
        r = f"r{d}"
        return self.seq(Set(r, Par(self.lit())), App(Lam(self.fresh("w"), PAR_NAT, body), Get(r)))

    def pick(self, options: list[Callable[[], Term]]) -> Term:
        return self.rng.choice(options)()

    # one method per target type; ``fuel`` bounds the remaining nesting

    def nat(self, d: int, fuel: int) -> Term:
        if fuel <= 0:
            return self.lit()
        f = fuel - 1
        opts = [
            self.lit,
            lambda: Arith(self.op(), self.lit(), self.lit()),
            lambda: self._nat_lam(d, f),
            lambda: self._nat_lam2(d, f),
        ]
        if d >= 1:
            opts.append(lambda: App(Lam(self.fresh("w"), PAR_NAT, self.nat(d, f)), self.par_nat(d, f)))
            opts.append(lambda: self.set_get(d, self.nat(d, f)))
        return self.pick(opts)

    def _nat_lam(self, d: int, f: int) -> Term:
        # (\x:Nat. x op k) N
        x = self.fresh("x")
        return App(Lam(x, NAT, Arith(self.op(), Var(x), self.lit())), self.nat(d, f))

    def _nat_lam2(self, d: int, f: int) -> Term:
        # (\x:Nat. \y:Nat. x op y) N1 N2, evaluated right to left
        x, y = self.fresh("x"), self.fresh("y")
        fn = Lam(x, NAT, Lam(y, NAT, Arith(self.op(), Var(x), Var(y))))
        return App(App(fn, self.nat(d, f)), self.nat(d, f))

    def unit(self, d: int, fuel: int) -> Term:
        if fuel <= 0:
            return UnitVal()
        f = fuel - 1
        opts = [
            UnitVal,
            lambda: App(self._id(UNIT), self.unit(d, f)),
            lambda: self.seq(self.unit(d, f), self.unit(d, f)),
            lambda: App(Lam(self.fresh("n"), NAT, UnitVal()), self.nat(d, f)),
        ]
        if d >= 1:
            opts.append(lambda: self.seq(Set(f"r{d}", Par(self.lit())), self.unit(d, f)))
            opts.append(lambda: self.set_get(d, self.unit(d, f)))
        return self.pick(opts)

    def _id(self, t: Type) -> Lam:
        x = self.fresh("x")
        return Lam(x, t, Var(x))

    def par_nat(self, d: int, fuel: int) -> Term:
        assert d >= 1
        f = fuel - 1
        x, y = self.fresh("b"), self.fresh("p")
        opts = [
            lambda: Par(self.nat(d - 1, f)),
            lambda: LetBang(x, Bang(self.lit()), Par(Arith(self.op(), Var(x), Var(x)))),
            lambda: LetPar(y, Par(self.lit()),
                           Par(App(Lam(x, NAT, Arith(self.op(), Var(y), Var(x))), self.nat(d - 1, f)))),
            lambda: App(Lam(x, PAR_NAT, LetPar(y, Var(x), Par(Arith("+", Var(y), self.lit())))),
                        self.par_nat(d, f)),
            lambda: self._dup_fn(d, f),
        ]
        if fuel <= 0:
            opts = opts[:3]
        return self.pick(opts)

    def _dup_fn(self, d: int, f: int) -> Term:
        # let !g = !(\z:Nat. z op k) in $(g (g N))
        g, z = self.fresh("g"), self.fresh("z")
        fn = Bang(Lam(z, NAT, Arith(self.op(), Var(z), self.lit())))
        return LetBang(g, fn, Par(App(Var(g), App(Var(g), self.nat(d - 1, f)))))

    def par_par_nat(self, d: int, fuel: int) -> Term:
        assert d >= 2
        return Par(self.par_nat(d - 1, fuel - 1))


def _regions(level: int) -> tuple[RegionDecl, ...]:
    return tuple(RegionDecl(f"r{k}", k, PAR_NAT) for k in range(1, level + 1))


def random_program(rng: random.Random, max_level: int = 3, fuel: int = 4,
                   name: str = "random") -> Program:
    level = rng.randint(0, max_level)
    g = _Gen(rng, level)
    kinds = ["unit", "nat"] + (["par"] if level >= 1 else []) + (["parpar"] if level >= 2 else [])
    kind = rng.choice(kinds)
    if kind == "unit":
        main = g.unit(level, fuel)
    elif kind == "nat":
        main = g.nat(level, fuel)
    elif kind == "par":
        main = g.par_nat(level, fuel)
    else:
        main = g.par_par_nat(level, fuel)
    return Program(_regions(level), main, level, name)


# -- fixed-depth families ------------------------------------------------------------

def _boxes(k: int, m: Term) -> Term:
    for _ in range(k):
        m = Par(m)
    return m


def app_chain(d: int, s: int) -> Program:
    """``$^d`` around ``s`` nested identity applications."""
    m: Term = UnitVal()
    for i in range(s):
        m = App(Lam(f"x{i}", UNIT, Var(f"x{i}")), m)
    return Program((), _boxes(d, m), d, f"app-chain-d{d}-s{s}")


def set_get_chain(d: int, s: int) -> Program:
    """``s`` sequenced set/get pairs on a depth-1 region, under ``d-1`` boxes."""
    if d < 1:
        raise ValueError("set/get chains need depth >= 1")
    m: Term = UnitVal()
    for i in reversed(range(s)):
        m = App(Lam(f"w{i}", PAR_NAT, m), Get("r"))
        m = App(Lam(f"_s{i}", UNIT, m), Set("r", Par(IntLit(i))))
    return Program((RegionDecl("r", 1, PAR_NAT),), _boxes(d - 1, m), d, f"set-get-d{d}-s{s}")


FAMILIES = {"app-chain": app_chain, "set-get-chain": set_get_chain}
