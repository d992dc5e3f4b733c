"""``lal``: check, run, bound and verify programs from the command line.

Exit status: 0 success, 1 type or parse error, 2 bound violation or stuck
run, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, TextIO, Union

from .cost import infer_weight, verify
from .machine import OutOfFuel, StuckAt, Terminated, eval, trace
from .monoid import norm
from .syntax import LalSyntaxError, Program, parse, show
from .typesystem import TypingError, check, erase

EXIT_OK, EXIT_REJECTED, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3
DEFAULT_MAX_STEPS = 100_000


@dataclass(frozen=True)
class Check:
    path: str
    emit_derivation: bool = False


@dataclass(frozen=True)
class Run:
    path: str
    max_steps: int = DEFAULT_MAX_STEPS
    trace: bool = False


@dataclass(frozen=True)
class Bound:
    path: str
    emit_derivation: bool = False


@dataclass(frozen=True)
class Verify:
    path: str


@dataclass(frozen=True)
class Corpus:
    dir: str


Command = Union[Check, Run, Bound, Verify, Corpus]


class _Out:
    """Routes records to stdout; in JSON mode, prose goes to stderr."""

    def __init__(self, as_json: bool, out: TextIO, err: TextIO):
        self.as_json, self.out, self.err = as_json, out, err

    def record(self, obj: dict, text: Callable[[], str]) -> None:
        if self.as_json:
            self.out.write(json.dumps(obj, ensure_ascii=False) + "\n")
        else:
            self.out.write(text() + "\n")

    def note(self, text: str) -> None:
        (self.err if self.as_json else self.out).write(text + "\n")

    def error(self, text: str) -> None:
        self.err.write(text + "\n")


class _IOFailure(Exception):
    pass


def _load(path: str) -> Program:
    try:
        source = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise _IOFailure(f"{path}: {e}") from e
    return parse(source, Path(path).name)


def _reject(out: _Out, path: str, e: Exception) -> int:
    variant = e.variant if isinstance(e, TypingError) else type(e).__name__
    out.record({"name": Path(path).name, "error": variant, "message": str(e)},
               lambda: f"{path}: {variant}: {e}")
    return EXIT_REJECTED


def _check(cmd: Check, out: _Out) -> int:
    c = check(_load(cmd.path))
    out.record({"name": c.program.name, "judgment": c.judgment}, lambda: c.judgment)
    if cmd.emit_derivation:
        out.note(c.derivation.dump())
    return EXIT_OK


def _run(cmd: Run, out: _Out) -> int:
    prog = _load(cmd.path)
    check(prog)
    m = erase(prog.main)
    if cmd.trace:
        for conf in trace(m, None, cmd.max_steps):
            out.record({"step": conf.steps, "focus": show(conf.focus), "env_depth": len(conf.env),
                        "store": conf.store.counts()}, conf.dump_line)
    res = eval(m, None, cmd.max_steps)
    if isinstance(res, Terminated):
        value, store = show(res.value), str(res.store)
        out.record({"outcome": res.tag, "value": value, "store": {r: [show(v) for v in vs] for r, vs in res.store.queues},
                    "steps": res.steps},
                   lambda: f"value {value}\nstore {store}\nsteps {res.steps}")
        return EXIT_OK
    if isinstance(res, StuckAt):
        out.record({"outcome": res.tag, "reason": str(res.reason), "steps": res.steps},
                   lambda: f"stuck {res.reason} after {res.steps} steps")
    else:
        assert isinstance(res, OutOfFuel)
        out.record({"outcome": res.tag, "steps": res.steps},
                   lambda: f"out of fuel after {res.steps} steps")
    return EXIT_VIOLATION


def _bound(cmd: Bound, out: _Out) -> int:
    c = check(_load(cmd.path))
    w = infer_weight(c.derivation).elem
    b = norm(w)
    out.record({"name": c.program.name, "weight": w.to_json(), "bound": b},
               lambda: f"weight {w}\nbound {b}")
    if cmd.emit_derivation:
        out.note(c.derivation.dump())
    return EXIT_OK


def _verify(cmd: Verify, out: _Out) -> int:
    report = verify(_load(cmd.path))
    # a report is JSON in both modes
    out.out.write(report.dumps() + "\n")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _corpus(cmd: Corpus, out: _Out) -> int:
    d = Path(cmd.dir)
    if not d.is_dir():
        raise _IOFailure(f"{cmd.dir}: not a directory")
    files = sorted(d.glob("*.lal"))
    passed, status = 0, EXIT_OK
    for f in files:
        try:
            report = verify(_load(str(f)))
        except (LalSyntaxError, TypingError) as e:
            _reject(out, str(f), e)
            status = max(status, EXIT_REJECTED)
            continue
        out.record(report.to_json(), report.dumps)
        if report.ok:
            passed += 1
        else:
            status = EXIT_VIOLATION
    out.note(f"passed {passed}/{len(files)}")
    return status


_HANDLERS = {Check: _check, Run: _run, Bound: _bound, Verify: _verify, Corpus: _corpus}


def run_command(cmd: Command, as_json: bool = False,
                out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    o = _Out(as_json, out or sys.stdout, err or sys.stderr)
    try:
        return _HANDLERS[type(cmd)](cmd, o)
    except _IOFailure as e:
        o.error(f"error: {e}")
        return EXIT_IO
    except (LalSyntaxError, TypingError) as e:
        return _reject(o, getattr(cmd, "path", ""), e)


def _non_negative(s: str) -> int:
    n = int(s)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="line-delimited JSON output")
    p = argparse.ArgumentParser(prog="lal", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("check", "bound"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("path")
        s.add_argument("--emit-derivation", action="store_true")
    s = sub.add_parser("run", parents=[common])
    s.add_argument("path")
    s.add_argument("--trace", action="store_true")
    s.add_argument("--max-steps", type=_non_negative, default=DEFAULT_MAX_STEPS)
    s = sub.add_parser("verify", parents=[common])
    s.add_argument("path")
    s = sub.add_parser("corpus", parents=[common])
    s.add_argument("dir")
    return p


def parse_command(argv: list[str]) -> tuple[Command, bool]:
    a = build_parser().parse_args(argv)
    if a.command == "check":
        cmd: Command = Check(a.path, a.emit_derivation)
    elif a.command == "bound":
        cmd = Bound(a.path, a.emit_derivation)
    elif a.command == "run":
        cmd = Run(a.path, a.max_steps, a.trace)
    elif a.command == "verify":
        cmd = Verify(a.path)
    else:
        cmd = Corpus(a.dir)
    return cmd, a.json


def main(argv: Optional[list[str]] = None) -> int:
    cmd, as_json = parse_command(sys.argv[1:] if argv is None else argv)
    return run_command(cmd, as_json)


if __name__ == "__main__":
    sys.exit(main())
