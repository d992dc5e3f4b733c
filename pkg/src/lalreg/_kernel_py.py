"""Pure-Python evaluation kernel over tuple-encoded terms.

Kept line-for-line parallel with ``_kernel.pyx``; any change here must be
mirrored there.

Term tags::

    0 var(name)        1 lam(name, body, annot)   2 region(r)    3 unit
    4 int(n)           5 arith(op, l, r)          6 bang(b)      7 par(b)
    8 app(f, a)        9 letbang(x, v, m)        10 letpar(x, v, m)
   11 get(r)          12 set(r, v)

Frame tags: 0 value(V), 1 term(M), 2 bang, 3 par.  The environment is a
list with the innermost frame last.

``run`` returns ``(status, focus, env, steps, info)`` with status
0 terminated, 1 out of fuel, 2 empty region (info = region name),
3 ill-formed (info = message).  The store dict is mutated in place.
"""

from collections import deque

TERMINATED = 0
OUT_OF_FUEL = 1
EMPTY_REGION = 2
ILL_FORMED = 3


def is_value(t):
    tag = t[0]
    while tag == 6 or tag == 7:
        t = t[1]
        tag = t[0]
    return tag <= 4


def subst(t, x, v):
    # Substituted values are closed during evaluation, so no capture is possible.
    tag = t[0]
    if tag == 0:
        return v if t[1] == x else t
    if tag == 1:
        if t[1] == x:
            return t
        return (1, t[1], subst(t[2], x, v), t[3])
    if tag == 8:
        return (8, subst(t[1], x, v), subst(t[2], x, v))
    if tag == 6 or tag == 7:
        return (tag, subst(t[1], x, v))
    if tag == 9 or tag == 10:
        if t[1] == x:
            return (tag, t[1], subst(t[2], x, v), t[3])
        return (tag, t[1], subst(t[2], x, v), subst(t[3], x, v))
    if tag == 5:
        return (5, t[1], subst(t[2], x, v), subst(t[3], x, v))
    if tag == 12:
        return (12, t[1], subst(t[2], x, v))
    return t


def _arith(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b if a > b else 0
    return a * b


def run(focus, env, store, fuel, start=0):
    steps = start
    limit = start + fuel
    while True:
        tag = focus[0]
        val = is_value(focus)
        if val and not env:
            return TERMINATED, focus, env, steps, None
        if steps >= limit:
            return OUT_OF_FUEL, focus, env, steps, None
        if val:
            frame = env[-1]
            ftag = frame[0]
            if ftag == 1:
                env[-1] = (0, focus)
                focus = frame[1]
            elif ftag == 0:
                if tag != 1:
                    return ILL_FORMED, focus, env, steps, "applied a non-function value"
                env.pop()
                focus = subst(focus[2], focus[1], frame[1])
            elif ftag == 2:
                env.pop()
                focus = (6, focus)
            else:
                env.pop()
                focus = (7, focus)
        elif tag == 8:
            env.append((1, focus[1]))
            focus = focus[2]
        elif tag == 5:
            a, b = focus[2], focus[3]
            if a[0] != 4 or b[0] != 4:
                return ILL_FORMED, focus, env, steps, "arithmetic on non-integers"
            focus = (4, _arith(focus[1], a[1], b[1]))
        elif tag == 6:
            env.append((2,))
            focus = focus[1]
        elif tag == 7:
            env.append((3,))
            focus = focus[1]
        elif tag == 9 or tag == 10:
            bound = focus[2]
            if bound[0] != tag - 3:
                return ILL_FORMED, focus, env, steps, "let-binder on a value of the wrong modality"
            focus = subst(focus[3], focus[1], bound[1])
        elif tag == 11:
            q = store.get(focus[1])
            if not q:
                return EMPTY_REGION, focus, env, steps, focus[1]
            focus = q.popleft()
        elif tag == 12:
            q = store.get(focus[1])
            if q is None:
                q = store[focus[1]] = deque()
            q.append(focus[2])
            focus = (3,)
        else:
            return ILL_FORMED, focus, env, steps, "no rule applies"
        steps += 1
