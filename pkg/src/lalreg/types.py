"""Types of the stratified region calculus."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True, slots=True)
class TVar:
    name: str


@dataclass(frozen=True, slots=True)
class UnitT:
    pass


@dataclass(frozen=True, slots=True)
class NatT:
    pass


@dataclass(frozen=True, slots=True)
class Lolli:
    dom: Type
    cod: Type


@dataclass(frozen=True, slots=True)
class BangT:
    body: Type


@dataclass(frozen=True, slots=True)
class ParT:
    body: Type


@dataclass(frozen=True, slots=True)
class Mu:
    var: str
    body: Type


@dataclass(frozen=True, slots=True)
class RegT:
    region: str
    content: Type


Type = Union[TVar, UnitT, NatT, Lolli, BangT, ParT, Mu, RegT]

UNIT = UnitT()
NAT = NatT()


def free_tvars(a: Type) -> frozenset[str]:
    if isinstance(a, TVar):
        return frozenset((a.name,))
    if isinstance(a, (UnitT, NatT)):
        return frozenset()
    if isinstance(a, Lolli):
        return free_tvars(a.dom) | free_tvars(a.cod)
    if isinstance(a, (BangT, ParT)):
        return free_tvars(a.body)
    if isinstance(a, Mu):
        return free_tvars(a.body) - {a.var}
    if isinstance(a, RegT):
        return free_tvars(a.content)
    raise TypeError(f"not a type: {a!r}")


def _fresh_tvar(base: str, avoid: frozenset[str]) -> str:
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def tsubst(a: Type, x: str, b: Type) -> Type:
    """Capture-avoiding ``a[b/x]``."""
    if isinstance(a, TVar):
        return b if a.name == x else a
    if isinstance(a, (UnitT, NatT)):
        return a
    if isinstance(a, Lolli):
        return Lolli(tsubst(a.dom, x, b), tsubst(a.cod, x, b))
    if isinstance(a, BangT):
        return BangT(tsubst(a.body, x, b))
    if isinstance(a, ParT):
        return ParT(tsubst(a.body, x, b))
    if isinstance(a, RegT):
        return RegT(a.region, tsubst(a.content, x, b))
    if isinstance(a, Mu):
        if a.var == x:
            return a
        fb = free_tvars(b)
        if a.var in fb:
            y = _fresh_tvar(a.var, fb | free_tvars(a.body))
            return Mu(y, tsubst(tsubst(a.body, a.var, TVar(y)), x, b))
        return Mu(a.var, tsubst(a.body, x, b))
    raise TypeError(f"not a type: {a!r}")


def unroll(a: Mu) -> Type:
    return tsubst(a.body, a.var, a)


def alpha_eq(a: Type, b: Type, env: tuple[tuple[str, str], ...] = ()) -> bool:
    """Syntactic equality up to renaming of mu-binders."""
    if isinstance(a, TVar) and isinstance(b, TVar):
        for x, y in env:
            if x == a.name or y == b.name:
                return x == a.name and y == b.name
        return a.name == b.name
    if type(a) is not type(b):
        return False
    if isinstance(a, (UnitT, NatT)):
        return True
    if isinstance(a, Lolli):
        return alpha_eq(a.dom, b.dom, env) and alpha_eq(a.cod, b.cod, env)
    if isinstance(a, (BangT, ParT)):
        return alpha_eq(a.body, b.body, env)
    if isinstance(a, RegT):
        return a.region == b.region and alpha_eq(a.content, b.content, env)
    if isinstance(a, Mu):
        return alpha_eq(a.body, b.body, ((a.var, b.var),) + env)
    raise TypeError(f"not a type: {a!r}")


def subterms(a: Type) -> Iterator[Type]:
    yield a
    if isinstance(a, Lolli):
        yield from subterms(a.dom)
        yield from subterms(a.cod)
    elif isinstance(a, (BangT, ParT)):
        yield from subterms(a.body)
    elif isinstance(a, Mu):
        yield from subterms(a.body)
    elif isinstance(a, RegT):
        yield from subterms(a.content)


def is_guarded(x: str, a: Type, under_modality: bool = False) -> bool:
    """Every free occurrence of ``x`` in ``a`` sits under a ``!`` or ``$``."""
    if isinstance(a, TVar):
        return a.name != x or under_modality
    if isinstance(a, (UnitT, NatT)):
        return True
    if isinstance(a, Lolli):
        return is_guarded(x, a.dom, under_modality) and is_guarded(x, a.cod, under_modality)
    if isinstance(a, (BangT, ParT)):
        return is_guarded(x, a.body, True)
    if isinstance(a, RegT):
        return is_guarded(x, a.content, under_modality)
    if isinstance(a, Mu):
        return a.var == x or is_guarded(x, a.body, under_modality)
    raise TypeError(f"not a type: {a!r}")


def show_type(a: Type, prec: int = 0) -> str:
    if isinstance(a, TVar):
        return a.name
    if isinstance(a, UnitT):
        return "Unit"
    if isinstance(a, NatT):
        return "Nat"
    if isinstance(a, Mu):
        s = f"mu {a.var}. {show_type(a.body, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(a, Lolli):
        s = f"{show_type(a.dom, 2)} -o {show_type(a.cod, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(a, BangT):
        return "!" + show_type(a.body, 2)
    if isinstance(a, ParT):
        return "$" + show_type(a.body, 2)
    if isinstance(a, RegT):
        return f"Reg[{a.region}] " + show_type(a.content, 2)
    raise TypeError(f"not a type: {a!r}")
