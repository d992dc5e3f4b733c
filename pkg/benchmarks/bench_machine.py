"""Compare the compiled and pure-Python machine kernels on generated programs.

    python3 benchmarks/bench_machine.py [--sizes 100 400 1600] [--repeat 5]
"""

import argparse
import statistics
import sys
import time

from lalreg.kernel import available_backends, load_backend
from lalreg.machine import encode
from lalreg.syntax import App, Get, IntLit, Lam, Par, Set, UnitVal, Var
from lalreg.types import NAT, UNIT, ParT


def id_chain(n: int):
    m = UnitVal()
    for _ in range(n):
        m = App(Lam("x", UNIT, Var("x")), m)
    return m


def set_get_chain(n: int):
    # set(r, $k); (\_:$Nat. ...) get(r), repeated n times
    m = UnitVal()
    for k in range(n):
        m = App(Lam("_u", ParT(NAT), m), Get("r"))
        m = App(Lam("_s", UNIT, m), Set("r", Par(IntLit(k))))
    return m


FAMILIES = {"id-chain": id_chain, "set-get-chain": set_get_chain}


def bench(encoded, backend, repeat: int) -> tuple[int, float]:
    """Median wall time of the kernel loop alone; encoding is done once up front."""
    times, steps = [], 0
    for _ in range(repeat):
        t0 = time.perf_counter()
        status, _, _, steps, _ = backend.run(encoded, [], {}, 10**9, 0)
        times.append(time.perf_counter() - t0)
        assert status == 0
    return steps, statistics.median(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 400, 1600])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    # generated terms nest linearly in their size
    sys.setrecursionlimit(max(10_000, 20 * max(args.sizes)))
    names = available_backends()
    if "cython" not in names:
        print("compiled kernel not built; only the fallback is timed")
    print(f"{'family':<15}{'size':>6}{'steps':>9}" + "".join(f"{n + ' ms':>13}" for n in names)
          + ("    speedup" if len(names) > 1 else ""))
    for fam, gen in FAMILIES.items():
        for n in args.sizes:
            term = encode(gen(n))
            res = {b: bench(term, load_backend(b), args.repeat) for b in names}
            steps = {s for s, _ in res.values()}
            assert len(steps) == 1, "backends disagree on step counts"
            row = f"{fam:<15}{n:>6}{steps.pop():>9}" + "".join(f"{res[b][1] * 1e3:>13.2f}" for b in names)
            if len(names) > 1:
                row += f"{res['python'][1] / res['cython'][1]:>10.2f}x"
            print(row)


if __name__ == "__main__":
    main()
