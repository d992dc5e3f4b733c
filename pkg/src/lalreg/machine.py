"""Right-to-left call-by-value abstract machine with exact step counting.

``step`` and ``trace`` work on the syntax tree directly and are meant for
inspection.  ``eval`` runs the same transition rules through the kernel
(compiled when available), which is what the bound checker uses.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import kernel
from .syntax import (App, Arith, Bang, Fold, Get, IntLit, Lam, LetBang, LetPar,
                     Par, RegionConst, Set, Term, UnitVal, Unfold, Var, arith,
                     is_value, show, subst)
from .types import UnitT


# -- environments ----------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ValueFrame:
    value: Term


@dataclass(frozen=True, slots=True)
class TermFrame:
    term: Term


@dataclass(frozen=True, slots=True)
class BangFrame:
    pass


@dataclass(frozen=True, slots=True)
class ParFrame:
    pass


Frame = Union[ValueFrame, TermFrame, BangFrame, ParFrame]
# innermost frame first; the empty tuple is the empty frame
Environment = tuple


def modal_frames(env: Sequence[Frame]) -> int:
    return sum(1 for f in env if isinstance(f, (BangFrame, ParFrame)))


def show_frame(f: Frame) -> str:
    if isinstance(f, ValueFrame):
        return f"{show(f.value, 3)}."
    if isinstance(f, TermFrame):
        return f"{show(f.term, 3)} (.)"
    return "!." if isinstance(f, BangFrame) else "$."


# -- stores -------------------------------------------------------------------

@dataclass(frozen=True)
class Store:
    """Region name to FIFO queue of stored values.  Empty queues are dropped."""

    queues: tuple[tuple[str, tuple[Term, ...]], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, Iterable[Term]] | None = None) -> Store:
        if not mapping:
            return cls()
        items = tuple(sorted((r, tuple(vs)) for r, vs in mapping.items() if vs))
        for _, vs in items:
            for v in vs:
                if not is_value(v):
                    raise ValueError(f"store entries must be values: {show(v)}")
        return cls(items)

    def as_dict(self) -> dict[str, tuple[Term, ...]]:
        return dict(self.queues)

    def queue(self, r: str) -> tuple[Term, ...]:
        for name, vs in self.queues:
            if name == r:
                return vs
        return ()

    def push(self, r: str, v: Term) -> Store:
        d = self.as_dict()
        d[r] = d.get(r, ()) + (v,)
        return Store.of(d)

    def pop(self, r: str) -> tuple[Term, Store]:
        d = self.as_dict()
        q = d.get(r, ())
        if not q:
            raise KeyError(r)
        d[r] = q[1:]
        return q[0], Store.of(d)

    def counts(self) -> dict[str, int]:
        return {r: len(vs) for r, vs in self.queues}

    def __len__(self) -> int:
        return sum(len(vs) for _, vs in self.queues)

    def __str__(self) -> str:
        inner = ", ".join(f"{r} <= {show(v)}" for r, vs in self.queues for v in vs)
        return "{" + inner + "}"


EMPTY_STORE = Store()


# -- configurations and results -----------------------------------------------------

@dataclass(frozen=True)
class Configuration:
    focus: Term
    env: Environment = ()
    store: Store = EMPTY_STORE
    steps: int = 0

    def dump_line(self) -> str:
        counts = ", ".join(f"{r}: {n}" for r, n in self.store.counts().items())
        return (f"step {self.steps} | focus {show(self.focus)} | "
                f"env-depth {len(self.env)} | store {{{counts}}}")


@dataclass(frozen=True)
class EmptyRegion:
    region: str

    def __str__(self):
        return f"EmptyRegion({self.region})"


@dataclass(frozen=True)
class IllFormed:
    message: str

    def __str__(self):
        return f"IllFormed({self.message})"


StuckReason = Union[EmptyRegion, IllFormed]


@dataclass(frozen=True)
class Next:
    config: Configuration


@dataclass(frozen=True)
class Terminal:
    value: Term
    store: Store


@dataclass(frozen=True)
class Stuck:
    reason: StuckReason


StepResult = Union[Next, Terminal, Stuck]


@dataclass(frozen=True)
class Terminated:
    value: Term
    store: Store
    steps: int
    tag = "Terminated"


@dataclass(frozen=True)
class OutOfFuel:
    steps: int
    config: Optional[Configuration] = field(default=None, compare=False)
    tag = "OutOfFuel"


@dataclass(frozen=True)
class StuckAt:
    config: Configuration
    reason: StuckReason

    @property
    def steps(self) -> int:
        return self.config.steps

    @property
    def tag(self) -> str:
        return "EmptyRegion" if isinstance(self.reason, EmptyRegion) else "IllFormed"


Outcome = Union[Terminated, OutOfFuel, StuckAt]


# -- the transition relation ------------------------------------------------------

def step(c: Configuration) -> StepResult:
    m, env, store = c.focus, c.env, c.store
    n = c.steps + 1
    if is_value(m):
        if not env:
            return Terminal(m, store)
        top, rest = env[0], env[1:]
        if isinstance(top, TermFrame):
            return Next(Configuration(top.term, (ValueFrame(m),) + rest, store, n))
        if isinstance(top, ValueFrame):
            if not isinstance(m, Lam):
                return Stuck(IllFormed("applied a non-function value"))
            return Next(Configuration(subst(m.body, m.binder, top.value), rest, store, n))
        wrap = Bang if isinstance(top, BangFrame) else Par
        return Next(Configuration(wrap(m), rest, store, n))
    if isinstance(m, App):
        return Next(Configuration(m.arg, (TermFrame(m.fn),) + env, store, n))
    if isinstance(m, Arith):
        if not (isinstance(m.left, IntLit) and isinstance(m.right, IntLit)):
            return Stuck(IllFormed("arithmetic on non-integers"))
        return Next(Configuration(IntLit(arith(m.op, m.left.n, m.right.n)), env, store, n))
    if isinstance(m, Bang):
        return Next(Configuration(m.body, (BangFrame(),) + env, store, n))
    if isinstance(m, Par):
        return Next(Configuration(m.body, (ParFrame(),) + env, store, n))
    if isinstance(m, (LetBang, LetPar)):
        want = Bang if isinstance(m, LetBang) else Par
        if not isinstance(m.bound, want):
            return Stuck(IllFormed("let-binder on a value of the wrong modality"))
        return Next(Configuration(subst(m.body, m.binder, m.bound.body), env, store, n))
    if isinstance(m, Get):
        if not store.queue(m.region):
            return Stuck(EmptyRegion(m.region))
        v, store = store.pop(m.region)
        return Next(Configuration(v, env, store, n))
    if isinstance(m, Set):
        return Next(Configuration(UnitVal(), env, store.push(m.region, m.payload), n))
    return Stuck(IllFormed("no rule applies"))


def initial(m: Term, store: Store | Mapping[str, Iterable[Term]] | None = None) -> Configuration:
    if not isinstance(store, Store):
        store = Store.of(store)
    return Configuration(m, (), store, 0)


def trace(m: Term, store=None, fuel: int = 10_000) -> list[Configuration]:
    """Every configuration from the initial one until a final, stuck or fuel-exhausted one."""
    return trace_from(initial(m, store), fuel)


def trace_from(c: Configuration, fuel: int) -> list[Configuration]:
    out = [c]
    for _ in range(fuel):
        r = step(c)
        if not isinstance(r, Next):
            break
        c = r.config
        out.append(c)
    return out


def outcome_of_trace(configs: Sequence[Configuration], fuel: int) -> Outcome:
    """Classify where a trace ended, mirroring ``eval``."""
    last = configs[-1]
    r = step(last)
    if isinstance(r, Terminal):
        return Terminated(r.value, r.store, last.steps)
    if isinstance(r, Stuck):
        return StuckAt(last, r.reason)
    return OutOfFuel(last.steps, last)


def region_accesses(configs: Sequence[Configuration]) -> list[tuple[str, str, int]]:
    """``(kind, region, modal frames)`` for every get/set that fires in a trace."""
    out = []
    for a, b in zip(configs, configs[1:]):
        m = a.focus
        if isinstance(m, (Get, Set)) and b.steps == a.steps + 1:
            out.append(("get" if isinstance(m, Get) else "set", m.region, modal_frames(a.env)))
    return out


# -- kernel bridge ------------------------------------------------------------------

_TAGS = {Var: 0, Lam: 1, RegionConst: 2, UnitVal: 3, IntLit: 4, Arith: 5, Bang: 6,
         Par: 7, App: 8, LetBang: 9, LetPar: 10, Get: 11, Set: 12}


def encode(m: Term) -> tuple:
    if isinstance(m, Var):
        return (0, m.name)
    if isinstance(m, Lam):
        return (1, m.binder, encode(m.body), m.annotation)
    if isinstance(m, RegionConst):
        return (2, m.region)
    if isinstance(m, UnitVal):
        return (3,)
    if isinstance(m, IntLit):
        return (4, m.n)
    if isinstance(m, Arith):
        return (5, m.op, encode(m.left), encode(m.right))
    if isinstance(m, (Bang, Par)):
        return (_TAGS[type(m)], encode(m.body))
    if isinstance(m, App):
        return (8, encode(m.fn), encode(m.arg))
    if isinstance(m, (LetBang, LetPar)):
        return (_TAGS[type(m)], m.binder, encode(m.bound), encode(m.body))
    if isinstance(m, Get):
        return (11, m.region)
    if isinstance(m, Set):
        return (12, m.region, encode(m.payload))
    if isinstance(m, (Fold, Unfold)):
        raise ValueError("fold/unfold must be erased before evaluation")
    raise TypeError(f"not a term: {m!r}")


def decode(t: tuple) -> Term:
    tag = t[0]
    if tag == 0:
        return Var(t[1])
    if tag == 1:
        return Lam(t[1], t[3] if len(t) > 3 else UnitT(), decode(t[2]))
    if tag == 2:
        return RegionConst(t[1])
    if tag == 3:
        return UnitVal()
    if tag == 4:
        return IntLit(t[1])
    if tag == 5:
        return Arith(t[1], decode(t[2]), decode(t[3]))
    if tag == 6:
        return Bang(decode(t[1]))
    if tag == 7:
        return Par(decode(t[1]))
    if tag == 8:
        return App(decode(t[1]), decode(t[2]))
    if tag == 9:
        return LetBang(t[1], decode(t[2]), decode(t[3]))
    if tag == 10:
        return LetPar(t[1], decode(t[2]), decode(t[3]))
    if tag == 11:
        return Get(t[1])
    if tag == 12:
        return Set(t[1], decode(t[2]))
    raise ValueError(f"bad kernel tag {tag}")


def _encode_frame(f: Frame) -> tuple:
    if isinstance(f, ValueFrame):
        return (0, encode(f.value))
    if isinstance(f, TermFrame):
        return (1, encode(f.term))
    return (2,) if isinstance(f, BangFrame) else (3,)


def _decode_frame(t: tuple) -> Frame:
    if t[0] == 0:
        return ValueFrame(decode(t[1]))
    if t[0] == 1:
        return TermFrame(decode(t[1]))
    return BangFrame() if t[0] == 2 else ParFrame()


def _decode_store(store: dict) -> Store:
    return Store.of({r: [decode(v) for v in q] for r, q in store.items()})


def run_config(c: Configuration, fuel: int, backend=None) -> Outcome:
    """Run at most ``fuel`` transitions from ``c``; step counts continue from ``c.steps``."""
    run = kernel.run if backend is None else backend.run
    env = [_encode_frame(f) for f in reversed(c.env)]
    store = {r: deque(encode(v) for v in vs) for r, vs in c.store.queues}
    status, focus, env, steps, info = run(encode(c.focus), env, store, fuel, c.steps)
    if status == 0:
        return Terminated(decode(focus), _decode_store(store), steps)
    final = Configuration(decode(focus), tuple(_decode_frame(f) for f in reversed(env)),
                          _decode_store(store), steps)
    if status == 1:
        return OutOfFuel(steps, final)
    if status == 2:
        return StuckAt(final, EmptyRegion(info))
    return StuckAt(final, IllFormed(info))


def eval(m: Term, store=None, fuel: int = 10_000, backend=None) -> Outcome:  # noqa: A001
    return run_config(initial(m, store), fuel, backend)
