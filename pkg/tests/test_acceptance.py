"""Acceptance criteria, one test each, at the stated sizes and tolerances.

Every test records a single ``criterion N: PASS|FAIL | detail`` line, shown in
the pytest summary and printed directly when run as a script:
``python3 tests/test_acceptance.py``.
"""

import math
import random
import subprocess
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import ACCEPTANCE_LINES, CORPUS, SEED, corpus_files, load  # noqa: E402
from lalreg.cost import infer_weight, saturation_counterexamples, verify  # noqa: E402
from lalreg.gen import FAMILIES, random_program  # noqa: E402
from lalreg.kernel import available_backends, load_backend  # noqa: E402
from lalreg.machine import StuckAt, eval, region_accesses, trace  # noqa: E402
from lalreg.monoid import LAWS, check_law, mnat, random_elem  # noqa: E402
from lalreg.syntax import parse_term  # noqa: E402
from lalreg.typesystem import (NonValueUnderBang, TypingError, UnguardedMu, check,  # noqa: E402
                               check_term, erase)
from lalreg.types import NAT, ParT  # noqa: E402

REQUIRED_CORPUS = {
    "dup_across_regions.lal": "duplicator with a set prologue",
    "square_from_region.lal": "$-guarded square read from a region",
    "id_chain.lal": "identity chain",
    "app_left_chain.lal": "application chain",
    "par_nested3.lal": "$-promotions nested to depth 3",
    "bang_dup.lal": "!-duplication via let-!",
}


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES.append(line)
    if __name__ == "__main__":
        print(line, flush=True)


# 1 -------------------------------------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    files = corpus_files()
    reports = [verify(load(f)) for f in files]
    elapsed = time.perf_counter() - t0
    names = {r.name for r in reports}
    missing = [k for k in REQUIRED_CORPUS if k not in names]
    violations = [r.name for r in reports if not r.ok]
    ok = len(reports) >= 20 and not missing and not violations and elapsed < 10
    return ok, (f"{len(reports)} programs, {len(violations)} violations, missing {missing or 'none'}, "
                f"{elapsed:.2f}s")


def test_criterion_1_corpus_bound_soundness():
    ok, detail = criterion_1()
    report(1, ok, detail)
    assert ok, detail


# 2 -------------------------------------------------------------------------------------

def criterion_2():
    r = verify(load(CORPUS / "id.lal"))
    w = infer_weight(check_term(parse_term("get(r)"), {"r": (0, ParT(NAT))}, 0))
    get_node = w.provenance[0]
    ok = (r.bound, r.steps, r.margin) == (3, 3, 0) and get_node.rule == "get" and get_node.total == mnat(5)
    return ok, f"id: bound {r.bound} steps {r.steps} margin {r.margin}; get node weight {get_node.total}"


def test_criterion_2_desk_constants():
    ok, detail = criterion_2()
    report(2, ok, detail)
    assert ok, detail


# 3 -------------------------------------------------------------------------------------

def criterion_3():
    t0 = time.perf_counter()
    results = [check_law(name, random.Random(SEED + i), elements=10_000, samples=100)
               for i, name in enumerate(sorted(LAWS))]
    elapsed = time.perf_counter() - t0
    ok = all(r.holds for r in results) and elapsed < 60
    parts = ", ".join(f"{r.name} {r.counterexamples}/{r.checked}" for r in results)
    return ok, f"counterexamples: {parts}; {elapsed:.1f}s", results


def test_criterion_3_monoid_laws():
    ok, detail, results = criterion_3()
    report(3, ok, detail)
    for r in results:
        if not r.holds:
            ACCEPTANCE_LINES.append(f"criterion 3:   {r.name}: first counterexample inputs "
                                    f"{[str(x) for x in r.example[0]]} witness {r.example[1]}")
    assert ok, detail


# 4 -------------------------------------------------------------------------------------

def criterion_4():
    rng = random.Random(SEED)
    traces, positions, bad = 0, 0, []
    while traces < 1000:
        p = random_program(rng)
        w = infer_weight(check(p).derivation).elem
        tr = trace(erase(p.main))
        bad += saturation_counterexamples(tr, w, [random_elem(rng) for _ in range(3)])
        traces += 1
        positions += len(tr)
    return not bad, f"{traces} traces, {positions} positions, {len(bad)} counterexamples"


def test_criterion_4_pole_saturation():
    ok, detail = criterion_4()
    report(4, ok, detail)
    assert ok, detail


# 5 -------------------------------------------------------------------------------------

def slope_limit(d: int) -> int:
    """1 + the largest polynomial degree ``d`` nested promotions can produce."""
    deg = 0
    for _ in range(d):
        deg = 3 * deg + 3
    return 1 + deg


def _fit(points):
    n = len(points)
    mx = sum(x for x, _ in points) / n
    my = sum(y for _, y in points) / n
    return sum((x - mx) * (y - my) for x, y in points) / sum((x - mx) ** 2 for x, _ in points)


def criterion_5():
    problems, summary = [], []
    for fam, make in sorted(FAMILIES.items()):
        for d in (1, 2, 3):
            reports = [verify(make(d, s)) for s in range(10, 101, 10)]
            if any(not r.ok for r in reports):
                problems.append(f"{fam} d={d}: bound violated")
            degrees = {r.weight.f.degree for r in reports}
            if len(degrees) != 1:
                problems.append(f"{fam} d={d}: degrees {sorted(degrees)}")
            top = reports[-1].size
            upper = [(math.log(r.size), math.log(r.bound)) for r in reports if r.size >= top / 2]
            fitted = _fit(upper)
            local = [(y2 - y1) / (x2 - x1) for (x1, y1), (x2, y2) in zip(upper, upper[1:])]
            spread = max(abs(s - fitted) for s in local)
            if fitted > slope_limit(d) or spread > 0.2:
                problems.append(f"{fam} d={d}: slope {fitted:.2f} spread {spread:.3f}")
            summary.append(f"{fam}/d{d} slope {fitted:.2f} (limit {slope_limit(d)}, spread {spread:.2f})")
    return not problems, "; ".join(problems or summary)


def test_criterion_5_polynomial_scaling():
    ok, detail = criterion_5()
    report(5, ok, detail)
    assert ok, detail


# 6 -------------------------------------------------------------------------------------

def _variant(path):
    try:
        check(load(path))
    except TypingError as e:
        return type(e)
    return None


def criterion_6():
    a = _variant(CORPUS / "reject" / "reject_par_to_bang.lal")
    b = _variant(CORPUS / "reject" / "unguarded_mu.lal")
    ok = a is NonValueUnderBang and b is UnguardedMu
    return ok, f"$A -o !A: {a and a.__name__}; mu X. X region: {b and b.__name__}"


def test_criterion_6_negative_typing():
    ok, detail = criterion_6()
    report(6, ok, detail)
    assert ok, detail


# 7 -------------------------------------------------------------------------------------

def _run_all():
    dumps, reports = [], []
    for f in corpus_files():
        p = load(f)
        dumps.append("\n".join(c.dump_line() for c in trace(erase(p.main))))
        reports.append(verify(p).dumps())
    return dumps, reports


def _dump_in_subprocess() -> bytes:
    return subprocess.run([sys.executable, __file__, "--dump"], check=True, capture_output=True).stdout


def criterion_7():
    ill = []
    for f in corpus_files():
        m = erase(check(load(f)).program.main)
        for b in available_backends():
            out = eval(m, None, 100_000, load_backend(b))
            if isinstance(out, StuckAt) and out.tag == "IllFormed":
                ill.append(f"{f.name}({b})")
    first, second = _dump_in_subprocess(), _dump_in_subprocess()
    same = first == second and first.strip() != ""
    return not ill and same, (f"IllFormed: {ill or 'none'}; traces and reports byte-identical across two processes: {same}; "
                              f"backends {available_backends()}")


def test_criterion_7_progress_and_determinism():
    ok, detail = criterion_7()
    report(7, ok, detail)
    assert ok, detail


# 8 -------------------------------------------------------------------------------------

def criterion_8():
    fired, bad = 0, []
    for f in corpus_files():
        c = check(load(f))
        for kind, r, frames in region_accesses(trace(erase(c.program.main))):
            fired += 1
            want = c.level - c.regions[r][0]
            if frames != want:
                bad.append(f"{f.name}: {kind}({r}) under {frames} frames, expected {want}")
    return not bad and fired > 0, f"{fired} fired accesses, {len(bad)} mismatches"


def test_criterion_8_stratification():
    ok, detail = criterion_8()
    report(8, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    if sys.argv[1:] == ["--dump"]:
        dumps, reports = _run_all()
        sys.stdout.write("\n".join(dumps + reports) + "\n")
        sys.exit(0)
    failed = 0
    for n, fn in enumerate((criterion_1, criterion_2, criterion_3, criterion_4,
                            criterion_5, criterion_6, criterion_7, criterion_8), 1):
        ok, detail, *_ = fn()
        report(n, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
