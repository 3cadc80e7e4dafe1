"""Command-line front end.

Exit status: 0 success or proven, 1 verification failure, fuzz failure or
abort, 2 usage or parse error, 3 resource limit (fuel, search depth, domain).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .assertions import DomainConfig, Unsupported, sat
from .fuzz import DEFAULT_DOMAIN, FuzzConfig, fuzz_triple
from .semantics import Abort, EvalError, Final, OutOfFuel, State, exec_command, trace_lines
from .symbolic.entail import SearchLimit, entails
from .symbolic.heap import OutsideFragment, from_assertion
from .syntax.ast import is_seq_name
from .syntax.parser import ParseError, parse_assertion, parse_entailment, parse_program
from .verifier.checker import check_outline

OK, FAILED, USAGE, LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- literals -------------------------------------------------------------------


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"bad {what} {text!r}") from None


def parse_store(text: str) -> dict:
    """``x=10,y=11``; sequence variables take ``@a=[1 2 3]``."""
    store = {}
    for part in _split_top(text or ""):
        name, eq, value = part.partition("=")
        name, value = name.strip(), value.strip()
        if not eq or not name:
            raise UsageError(f"bad store entry {part!r}")
        if is_seq_name(name):
            if not (value.startswith("[") and value.endswith("]")):
                raise UsageError(f"sequence variable {name} needs a [..] value")
            store[name] = tuple(_int(v, "sequence element") for v in value[1:-1].split())
        else:
            store[name] = _int(value, "store value")
    return store


def parse_heap(text: str) -> dict:
    """``10:1,11:2``."""
    heap = {}
    for part in _split_top(text or ""):
        loc, colon, value = part.partition(":")
        if not colon:
            raise UsageError(f"bad heap entry {part!r}")
        l = _int(loc.strip(), "location")
        if l < 1:
            raise UsageError(f"location {l} is not positive")
        heap[l] = _int(value.strip(), "heap value")
    return heap


def parse_domain(text: str) -> frozenset:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise UsageError(f"bad domain {text!r}, expected LO..HI")
    lo_i, hi_i = _int(lo, "domain bound"), _int(hi, "domain bound")
    if lo_i > hi_i:
        raise UsageError(f"empty domain {text!r}")
    return frozenset(range(lo_i, hi_i + 1))


def _read_program(path: str):
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_program(text)
    except ParseError as exc:
        raise UsageError(f"{path}:{exc}") from None


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


def _state_dict(st: State) -> dict:
    return {
        "store": {k: list(v) if isinstance(v, tuple) else v for k, v in st.store.items()},
        "heap": {str(l): st.heap[l] for l in sorted(st.heap)},
    }


# -- subcommands ------------------------------------------------------------------


def cmd_check(args) -> int:
    prog = _read_program(args.file)
    stream = None if args.json else (lambda r: print(r.line_text(), flush=True))
    report = check_outline(prog, depth=args.depth, on_obligation=stream)
    if args.json:
        _emit(report.to_dict())
    else:
        print(report.summary())
    if report.proven:
        return OK
    hard = [r for r in report.results if r.verdict != "proven" and not r.resource_limit]
    return FAILED if hard else LIMIT


def cmd_run(args) -> int:
    prog = _read_program(args.file)
    store = {v: 0 for v in prog.variables}
    store.update(parse_store(args.store))
    s0 = State(store, parse_heap(args.heap))
    try:
        outcome, trace = exec_command(prog.body, s0, args.fuel, args.alloc_base)
    except EvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        out = {"schema": "sepcheck.run/1", "initial": _state_dict(s0)}
        out["trace"] = [_state_dict(t) for t in trace] if args.trace else None
        if isinstance(outcome, Final):
            out["outcome"] = {"kind": "final", "state": _state_dict(outcome.state)}
        elif isinstance(outcome, Abort):
            out["outcome"] = {
                "kind": "abort",
                "step": outcome.step,
                "address": outcome.address,
                "message": outcome.describe(),
            }
        else:
            out["outcome"] = {"kind": "out_of_fuel", "steps": outcome.steps, "state": _state_dict(outcome.state)}
        _emit(out)
    elif args.trace:
        for line in trace_lines(s0, outcome, trace):
            print(line)
    elif isinstance(outcome, Final):
        print(outcome.state)
    elif isinstance(outcome, Abort):
        print(outcome.describe())
    else:
        print(f"out of fuel after {outcome.steps} steps")
    if isinstance(outcome, Abort):
        return FAILED
    if isinstance(outcome, OutOfFuel):
        return LIMIT
    return OK


def cmd_sat(args) -> int:
    try:
        a = parse_assertion(args.assertion)
    except ParseError as exc:
        raise UsageError(f"assertion {exc}") from None
    domain = DomainConfig(value_domain=parse_domain(args.domain) if args.domain else None)
    st = State(parse_store(args.store), parse_heap(args.heap))
    try:
        verdict = sat(a, st, domain)
    except Unsupported as exc:
        print(f"unsupported: {exc}")
        return LIMIT
    except EvalError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        _emit({"schema": "sepcheck.sat/1", "assertion": args.assertion, "state": _state_dict(st), "sat": verdict})
    else:
        print("true" if verdict else "false")
    return OK


def cmd_entail(args) -> int:
    try:
        p, q = parse_entailment(args.entailment)
    except ParseError as exc:
        raise UsageError(f"entailment {exc}") from None
    status, trace, diagnostic = OK, None, ""
    try:
        trace = entails(from_assertion(p), from_assertion(q), depth=args.depth)
        if trace is None:
            status, diagnostic = FAILED, "entailment not found"
    except OutsideFragment as exc:
        status, diagnostic = FAILED, f"outside symbolic fragment: {exc}"
    except SearchLimit as exc:
        status, diagnostic = LIMIT, str(exc)
    verdict = "proven" if status == OK else "not proven"
    if args.json:
        _emit({
            "schema": "sepcheck.entail/1",
            "entailment": args.entailment,
            "verdict": verdict.replace(" ", "_"),
            "diagnostic": diagnostic,
            "trace": trace.to_dict() if trace else None,
        })
        return status
    print(verdict + (f" ({diagnostic})" if diagnostic else ""))
    if trace is not None and args.trace:
        print(trace.render())
    return status


def cmd_fuzz(args) -> int:
    prog = _read_program(args.file)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    domain = DEFAULT_DOMAIN
    if args.domain:
        domain = DomainConfig(parse_domain(args.domain), DEFAULT_DOMAIN.location_universe)
    cfg = FuzzConfig(args.samples, args.seed, domain, args.fuel, args.alloc_base)
    try:
        report = fuzz_triple(prog.pre, prog.body, prog.post, cfg, list(prog.variables))
    except Unsupported as exc:
        print(f"unsupported: {exc}")
        return LIMIT
    if args.json:
        _emit({"schema": "sepcheck.fuzz/1", **report.to_dict()})
    else:
        print(report.render())
    if report.failures:
        return FAILED
    if report.out_of_fuel or not report.samples:
        return LIMIT
    return OK


# -- dispatch -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sepcheck", description="Separation logic toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify a fully annotated program")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--depth", type=int, default=None, help="entailment search depth")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="execute a program")
    p.add_argument("file")
    p.add_argument("--store", default="", help="x=10,y=11 (declared variables default to 0)")
    p.add_argument("--heap", default="", help="10:1,11:2")
    p.add_argument("--fuel", type=int, default=10_000)
    p.add_argument("--alloc-base", type=int, default=1)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sat", help="model-check an assertion in a state")
    p.add_argument("assertion")
    p.add_argument("--store", default="")
    p.add_argument("--heap", default="")
    p.add_argument("--domain", default=None, help="quantifier value domain LO..HI")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("entail", help="decide a symbolic-heap entailment 'P |- Q'")
    p.add_argument("entailment")
    p.add_argument("--trace", action="store_true", help="print the rule tree")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_entail)

    p = sub.add_parser("fuzz", help="test a program's triple on sampled states")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuel", type=int, default=10_000)
    p.add_argument("--alloc-base", type=int, default=1)
    p.add_argument("--domain", default=None, help="store value domain LO..HI")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fuzz)
    return ap


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sepcheck {args.command}: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
