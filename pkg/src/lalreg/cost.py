"""Weight inference from typing derivations and bound verification."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .machine import Configuration, OutOfFuel, StuckAt, Terminated, eval, run_config
from .monoid import ZERO, MonoidElem, madd, mF, mnat, mpar, norm
from .syntax import Program, depth, is_value, size
from .typesystem import Derivation, check, erase
from .validate import ARITY

# constant charged per rule, on top of the children's weights
APP_COST = 3
ELIM_COST = 3
PAR_PROM_COST = 4
GET_COST = 5
SET_COST = 1
ARITH_COST = 1
CONTRACTION_COST = 1


class MalformedDerivation(Exception):
    pass


@dataclass(frozen=True)
class NodeWeight:
    rule: str
    local: str
    total: MonoidElem


@dataclass(frozen=True)
class Weight:
    elem: MonoidElem
    # preorder node index -> what that node contributed
    provenance: dict[int, NodeWeight]

    @property
    def norm(self) -> int:
        return norm(self.elem)


def infer_weight(d: Derivation) -> Weight:
    provenance: dict[int, NodeWeight] = {}
    memo: dict[int, MonoidElem] = {}
    counter = itertools.count()

    def go(n: Derivation) -> MonoidElem:
        nid = next(counter)
        if ARITY.get(n.rule) != len(n.children):
            raise MalformedDerivation(f"{n.rule} node with {len(n.children)} premises")
        ws = [go(c) for c in n.children]
        rule = n.rule
        if rule in ("v", "u", "int", "r"):
            w, local = ZERO, "0"
        elif rule == "arith":
            w, local = madd(madd(ws[0], ws[1]), mnat(ARITH_COST)), f"+{ARITH_COST}"
        elif rule in ("lam", "fold", "unfold"):
            w, local = ws[0], "="
        elif rule == "app":
            w, local = madd(madd(ws[0], ws[1]), mnat(APP_COST)), f"+{APP_COST}"
        elif rule in ("bang-elim", "par-elim"):
            w, local = madd(madd(ws[0], ws[1]), mnat(ELIM_COST)), f"+{ELIM_COST}"
        elif rule == "par-prom":
            w, local = madd(mpar(ws[0]), mnat(PAR_PROM_COST)), f"$(.)+{PAR_PROM_COST}"
        elif rule == "bang-prom":
            w, local = mF(ws[0]), "F(.)"
        elif rule == "get":
            w, local = mnat(GET_COST), str(GET_COST)
        elif rule == "set":
            payload = n.children[1]
            if payload.rule == "par-prom" and is_value(payload.term.body):
                # the stored value itself is weighed under the paragraph
                inner = memo[id(payload.children[0])]
                w = madd(madd(mpar(inner), mnat(SET_COST)), mnat(payload.contractions))
                local = f"$(payload)+{SET_COST}"
            else:
                w, local = madd(ws[1], mnat(SET_COST)), f"+{SET_COST}"
        else:
            raise MalformedDerivation(f"unknown rule {rule!r}")
        if n.contractions:
            w = madd(w, mnat(CONTRACTION_COST * n.contractions))
            local += f" +{n.contractions}c"
        provenance[nid] = NodeWeight(rule, local, w)
        memo[id(n)] = w
        return w

    return Weight(go(d), provenance)


def bound(d: Derivation) -> int:
    return norm(infer_weight(d).elem)


def pole_member(c: Configuration, p: MonoidElem) -> bool:
    """Does ``c`` terminate within ``|p|`` steps?"""
    budget = norm(p)
    out = run_config(c, budget)
    return isinstance(out, Terminated) and out.steps - c.steps <= budget


@dataclass(frozen=True)
class VerifyReport:
    name: str
    size: int
    depth: int
    weight: MonoidElem
    bound: int
    steps: int
    outcome: str
    ok: bool
    margin: int

    def to_json(self) -> dict:
        return {"name": self.name, "size": self.size, "depth": self.depth,
                "weight": self.weight.to_json(), "bound": self.bound, "steps": self.steps,
                "outcome": self.outcome, "ok": self.ok, "margin": self.margin}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)


def verify(prog: Program, fuel_cap: Optional[int] = None) -> VerifyReport:
    """Check ``prog``, infer its bound and run it from the empty store."""
    checked = check(prog)
    w = infer_weight(checked.derivation)
    b = norm(w.elem)
    cap = b + 1 if fuel_cap is None else fuel_cap
    out = eval(erase(prog.main), None, min(b, cap))
    if isinstance(out, Terminated):
        tag = "Terminated"
    elif isinstance(out, StuckAt):
        tag = out.tag
    else:
        assert isinstance(out, OutOfFuel)
        tag = "OutOfFuel"
    ok = isinstance(out, Terminated) and out.steps <= b
    return VerifyReport(prog.name, size(prog.main), depth(prog.main), w.elem, b,
                        out.steps, tag, ok, b - out.steps)


def saturation_counterexamples(configs: Sequence[Configuration], p: MonoidElem,
                               rs: Sequence[MonoidElem]) -> list[str]:
    """Check both saturation properties of the pole at every position of a trace.

    Each position is tried with ``p`` and with the tight weight ``mnat(remaining steps)``.
    """
    bad = []
    total = configs[-1].steps
    for i, c in enumerate(configs):
        for q in (p, mnat(total - c.steps)):
            if not pole_member(c, q):
                continue
            for r in rs:
                if not pole_member(c, madd(q, r)):
                    bad.append(f"<=-saturation at step {c.steps} with {q} + {r}")
            if i > 0 and not pole_member(configs[i - 1], madd(q, mnat(1))):
                bad.append(f"->-saturation at step {configs[i - 1].steps} with {q} + 1")
    return bad
