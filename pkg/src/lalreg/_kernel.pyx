# cython: language_level=3
"""Compiled evaluation kernel; mirrors ``_kernel_py.py`` exactly."""

from collections import deque

cdef enum:
    TERMINATED = 0
    OUT_OF_FUEL = 1
    EMPTY_REGION = 2
    ILL_FORMED = 3

cdef tuple _BANG_FRAME = (2,)
cdef tuple _PAR_FRAME = (3,)
cdef tuple _UNIT = (3,)


cpdef bint is_value(tuple t):
    cdef long tag = t[0]
    while tag == 6 or tag == 7:
        t = <tuple>t[1]
        tag = t[0]
    return tag <= 4


cpdef tuple subst(tuple t, str x, tuple v):
    cdef long tag = t[0]
    if tag == 0:
        return v if t[1] == x else t
    if tag == 1:
        if t[1] == x:
            return t
        return (1, t[1], subst(<tuple>t[2], x, v), t[3])
    if tag == 8:
        return (8, subst(<tuple>t[1], x, v), subst(<tuple>t[2], x, v))
    if tag == 6 or tag == 7:
        return (tag, subst(<tuple>t[1], x, v))
    if tag == 9 or tag == 10:
        if t[1] == x:
            return (tag, t[1], subst(<tuple>t[2], x, v), t[3])
        return (tag, t[1], subst(<tuple>t[2], x, v), subst(<tuple>t[3], x, v))
    if tag == 5:
        return (5, t[1], subst(<tuple>t[2], x, v), subst(<tuple>t[3], x, v))
    if tag == 12:
        return (12, t[1], subst(<tuple>t[2], x, v))
    return t


cdef object _arith(str op, object a, object b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b if a > b else 0
    return a * b


def run(tuple focus, list env, dict store, object fuel, object start=0):
    cdef long tag, ftag
    cdef bint val
    cdef tuple frame, a, b, bound
    cdef object steps, limit, q
    # step counters stay Python ints: fuel may exceed 64 bits
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
            frame = <tuple>env[-1]
            ftag = frame[0]
            if ftag == 1:
                env[-1] = (0, focus)
                focus = <tuple>frame[1]
            elif ftag == 0:
                if tag != 1:
                    return ILL_FORMED, focus, env, steps, "applied a non-function value"
                env.pop()
                focus = subst(<tuple>focus[2], <str>focus[1], <tuple>frame[1])
            elif ftag == 2:
                env.pop()
                focus = (6, focus)
            else:
                env.pop()
                focus = (7, focus)
        elif tag == 8:
            env.append((1, focus[1]))
            focus = <tuple>focus[2]
        elif tag == 5:
            a = <tuple>focus[2]
            b = <tuple>focus[3]
            if a[0] != 4 or b[0] != 4:
                return ILL_FORMED, focus, env, steps, "arithmetic on non-integers"
            focus = (4, _arith(<str>focus[1], a[1], b[1]))
        elif tag == 6:
            env.append(_BANG_FRAME)
            focus = <tuple>focus[1]
        elif tag == 7:
            env.append(_PAR_FRAME)
            focus = <tuple>focus[1]
        elif tag == 9 or tag == 10:
            bound = <tuple>focus[2]
            if bound[0] != tag - 3:
                return ILL_FORMED, focus, env, steps, "let-binder on a value of the wrong modality"
            focus = subst(<tuple>focus[3], <str>focus[1], <tuple>bound[1])
        elif tag == 11:
            q = store.get(focus[1])
            if not q:
                return EMPTY_REGION, focus, env, steps, focus[1]
            focus = <tuple>q.popleft()
        elif tag == 12:
            q = store.get(focus[1])
            if q is None:
                q = store[focus[1]] = deque()
            q.append(focus[2])
            focus = _UNIT
        else:
            return ILL_FORMED, focus, env, steps, "no rule applies"
        steps += 1
