"""The light resource monoid.

Elements are triples ``(n, m, f)`` where ``f`` is a polynomial with
nonnegative integer coefficients.  The norm ``n * f(m + n)`` turns an
abstract weight into a concrete step budget.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True, slots=True)
class Poly:
    """Polynomial ``c0 + c1*x + ...`` over the naturals."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        if any(c < 0 for c in self.coeffs):
            raise ValueError(f"negative coefficient in {self.coeffs}")
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def of(cls, *coeffs: int) -> Poly:
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        # the zero polynomial gets degree -1
        return len(self.coeffs) - 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def cmax(self, other: Poly) -> Poly:
        """Coefficient-wise maximum; dominates the pointwise max on naturals."""
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly(tuple(max(c, b[i]) if i < len(b) else c for i, c in enumerate(a)))

    def stretch(self, k: int) -> Poly:
        """The polynomial ``x -> x**k * f(x**k)``."""
        out = [0] * (k * len(self.coeffs) + k) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            out[k * i + k] = c
        return Poly(tuple(out))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x")
            else:
                terms.append(f"{c}*x^{i}")
        return " + ".join(terms) if terms else "0"


PolyLike = Union[Poly, Sequence[int]]


def _poly(f: PolyLike) -> Poly:
    return f if isinstance(f, Poly) else Poly(tuple(f))


@dataclass(frozen=True, slots=True)
class MonoidElem:
    n: int
    m: int
    f: Poly

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError(f"monoid components must be natural: ({self.n}, {self.m})")
        if not isinstance(self.f, Poly):
            object.__setattr__(self, "f", _poly(self.f))

    def __add__(self, other: MonoidElem) -> MonoidElem:
        return madd(self, other)

    def __str__(self) -> str:
        return f"({self.n}, {self.m}, {self.f})"

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "coeffs": list(self.f.coeffs)}

    @classmethod
    def from_json(cls, obj: dict) -> MonoidElem:
        return cls(obj["n"], obj["m"], Poly(tuple(obj["coeffs"])))


def elem(n: int, m: int, coeffs: PolyLike) -> MonoidElem:
    return MonoidElem(n, m, _poly(coeffs))


def madd(p: MonoidElem, q: MonoidElem) -> MonoidElem:
    return MonoidElem(p.n + q.n, max(p.m, q.m), p.f.cmax(q.f))


def norm(p: MonoidElem) -> int:
    return p.n * p.f(p.m + p.n)


def norm_add(p: MonoidElem, q: MonoidElem) -> int:
    """``norm(madd(p, q))`` without building the sum."""
    n = p.n + q.n
    x = max(p.m, q.m) + n
    a, b = p.f.coeffs, q.f.coeffs
    if len(a) < len(b):
        a, b = b, a
    k = len(b)
    acc = 0
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if i < k and b[i] > c:
            c = b[i]
        acc = acc * x + c
    return n * acc


def mbang(p: MonoidElem) -> MonoidElem:
    return MonoidElem(1, p.n + p.m, p.f.stretch(3))


def mpar(p: MonoidElem) -> MonoidElem:
    # ceiling division, guarded at m = 0
    d = max(p.m, 1)
    return MonoidElem(-(-p.n // d), p.m, p.f.stretch(2))


def mF(p: MonoidElem) -> MonoidElem:
    return MonoidElem(1 + p.n + p.m, p.m, p.f.stretch(3))


_ONE = Poly((1,))


def mnat(k: int) -> MonoidElem:
    """The constant weight ``k``; its norm is exactly ``k``."""
    return MonoidElem(k, 0, _ONE)


ZERO = mnat(0)


def msum(items: Iterable[MonoidElem]) -> MonoidElem:
    acc = ZERO
    for p in items:
        acc = madd(acc, p)
    return acc


# -- M-contexts ---------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class AddFrame:
    elem: MonoidElem


class _Modal:
    __slots__ = ()
    symbol = "?"

    def __repr__(self):
        return f"{type(self).__name__}()"

    def __eq__(self, other):
        return type(self) is type(other)

    def __hash__(self):
        return hash(type(self))


class BangFrame(_Modal):
    symbol = "!"


class ParFrame(_Modal):
    symbol = "$"


MFrame = Union[AddFrame, BangFrame, ParFrame]


@dataclass(frozen=True)
class MContext:
    """Composition of ``x + p``, ``!x`` and ``$x``; frames innermost first."""

    frames: tuple[MFrame, ...]

    def __post_init__(self):
        if not self.frames:
            raise ValueError("an M-context needs at least one frame")
        for fr in self.frames:
            if not isinstance(fr, (AddFrame, BangFrame, ParFrame)):
                raise TypeError(f"not an M-context frame: {fr!r}")

    def __call__(self, p: MonoidElem) -> MonoidElem:
        return ctx_apply(self, p)


def ctx_apply(e: MContext | Sequence[MFrame], p: MonoidElem) -> MonoidElem:
    frames = e.frames if isinstance(e, MContext) else tuple(e)
    for fr in frames:
        if isinstance(fr, AddFrame):
            p = madd(p, fr.elem)
        elif isinstance(fr, BangFrame):
            p = mbang(p)
        else:
            p = mpar(p)
    return p


# -- the preorder --------------------------------------------------------------

def leq_falsify(p: MonoidElem, q: MonoidElem, samples: Iterable[MonoidElem]) -> MonoidElem | None:
    """Return the first ``r`` with ``|p + r| > |q + r|``, or ``None``.

    Only refutes ``p <= q``; the preorder quantifies over the whole monoid.
    """
    found_any = False
    for r in samples:
        found_any = True
        if norm_add(p, r) > norm_add(q, r):
            return r
    if not found_any:
        raise ValueError("leq_falsify needs a nonempty sample set")
    return None


def random_elem(rng: random.Random, max_nm: int = 20, max_degree: int = 4,
                max_coeff: int = 5) -> MonoidElem:
    deg = rng.randint(0, max_degree)
    coeffs = [rng.randint(0, max_coeff) for _ in range(deg + 1)]
    return MonoidElem(rng.randint(0, max_nm), rng.randint(0, max_nm), Poly(tuple(coeffs)))


# -- sampled law checks --------------------------------------------------------------

@dataclass(frozen=True)
class LawResult:
    name: str
    checked: int
    counterexamples: int
    # first failing (inputs, witness r or None for norm laws)
    example: Optional[tuple] = None

    @property
    def holds(self) -> bool:
        return self.counterexamples == 0


def _leq_law(lhs, rhs, arity):
    def run(args, rs):
        r = leq_falsify(lhs(*args[:arity]), rhs(*args[:arity]), rs)
        return r is None, r
    return run


def _norm_law(check, arity):
    def run(args, rs):
        return check(*args[:arity]), None
    return run


def _norm_equal(a: MonoidElem, b: MonoidElem, rs) -> tuple[bool, Optional[MonoidElem]]:
    if norm(a) != norm(b):
        return False, None
    for r in rs:
        if norm_add(a, r) != norm_add(b, r):
            return False, r
    return True, None


TWO = mnat(2)
ONE = mnat(1)

LAWS = {
    "superadditivity": _norm_law(lambda p, q: norm(p) + norm(q) <= norm(madd(p, q)), 2),
    "par-below-bang": _leq_law(mpar, mbang, 1),
    "par-subadditive": _leq_law(lambda p, q: mpar(madd(p, q)), lambda p, q: madd(mpar(p), mpar(q)), 2),
    "par-sum-plus-two": _leq_law(lambda p, q: madd(mpar(p), mpar(q)),
                                 lambda p, q: madd(mpar(madd(p, q)), TWO), 2),
    "bang-doubling-norm": lambda args, rs: _norm_equal(madd(mbang(args[0]), mbang(args[0])),
                                                       madd(mbang(args[0]), ONE), rs),
    "functoriality": _leq_law(lambda p, q: mbang(madd(p, q)), lambda p, q: madd(mF(p), mbang(q)), 2),
}


def check_law(name: str, rng: random.Random, elements: int = 10_000, samples: int = 100,
              pool: int = 2_000) -> LawResult:
    """Sample ``elements`` inputs and ``samples`` witnesses ``r`` per check."""
    law = LAWS[name]
    rs_pool = [random_elem(rng) for _ in range(pool)]
    bad, first = 0, None
    for _ in range(elements):
        args = (random_elem(rng), random_elem(rng))
        rs = rng.sample(rs_pool, samples)
        ok, witness = law(args, rs)
        if not ok:
            bad += 1
            if first is None:
                first = (args, witness)
    return LawResult(name, elements, bad, first)
