"""Checking Hoare triples and fully annotated programs.

The checker walks a command left to right, carrying symbolic states forward.
Every annotation (and every loop invariant) is a target: the states that
reach it must entail it, which yields one obligation per path.  Annotations
then restart the walk from their own symbolic heap, so each obligation is
independent of the others.

Logical variables that first appear free in an annotation, and are neither
program variables nor ghosts of the specification or an invariant, are read
as existentially quantified in that annotation's obligation.  This is how an
outline drops the quantifier of ``exists a. P`` and goes on to reason about
``P`` for an arbitrary ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..symbolic.entail import ProofTrace, SearchLimit, entails
from ..symbolic.heap import (
    Normalized,
    OutsideFragment,
    SymbolicHeap,
    _pure_bexp,
    from_assertion,
    prepare,
)
from ..syntax.ast import (
    And,
    AnnotatedProgram,
    Annot,
    ATOMIC,
    BNot,
    Exists,
    If,
    While,
    bexp_to_assertion,
    seq_items,
)
from ..syntax.printer import assertion_str, bexp_str, command_str
from ..syntax.vars import assertion_vars
from .symexec import Fault, sym_exec

KINDS = ("triple-step", "implication", "invariant-entry", "invariant-preserve", "post-from-invariant")


@dataclass
class Obligation:
    kind: str
    line: int
    col: int
    antecedent: str
    command: Optional[str]
    consequent: str

    def describe(self) -> str:
        mid = f" {self.command} " if self.command else " |- "
        return f"{{{self.antecedent}}}{mid}{{{self.consequent}}}"


@dataclass
class Result:
    obligation: Obligation
    verdict: str  # "proven" | "not_proven" | "error"
    trace: Optional[ProofTrace] = None
    diagnostic: str = ""
    resource_limit: bool = False

    def to_dict(self) -> dict:
        ob = self.obligation
        return {
            "kind": ob.kind,
            "line": ob.line,
            "col": ob.col,
            "antecedent": ob.antecedent,
            "command": ob.command,
            "consequent": ob.consequent,
            "verdict": self.verdict,
            "diagnostic": self.diagnostic,
            "trace": self.trace.to_dict() if self.trace else None,
        }

    def line_text(self) -> str:
        ob = self.obligation
        head = f"{ob.line}:{ob.col} {ob.kind}: {self.verdict}"
        if self.diagnostic:
            head += f" ({self.diagnostic})"
        return head + "\n    " + ob.describe()


@dataclass
class CheckReport:
    results: list = field(default_factory=list)

    @property
    def proven(self) -> bool:
        return bool(self.results) and all(r.verdict == "proven" for r in self.results)

    @property
    def resource_limit(self) -> bool:
        return any(r.resource_limit for r in self.results)

    def summary(self) -> str:
        n = len(self.results)
        ok = sum(r.verdict == "proven" for r in self.results)
        if ok == n:
            return f"all {n} obligations proven"
        return f"{ok} of {n} obligations proven"

    def to_dict(self) -> dict:
        return {
            "schema": "sepcheck.check/1",
            "proven": self.proven,
            "summary": self.summary(),
            "obligations": [r.to_dict() for r in self.results],
        }

    def render(self) -> str:
        return "\n".join([r.line_text() for r in self.results] + [self.summary()])


@dataclass
class _Path:
    state: Optional[Normalized]
    text: str
    start_vars: set
    origin: str = "annotation"  # or "loop-exit"
    cmds: list = field(default_factory=list)
    error: str = ""
    fault: str = ""
    vacuous: bool = False

    def advanced(self, state, cmd) -> "_Path":
        return _Path(state, self.text, self.start_vars, self.origin, self.cmds + [cmd], self.error, self.fault, state is None and not self.error and not self.fault)


class _Walker:
    def __init__(self, program_vars, ghosts, depth, on_obligation):
        self.program_vars = tuple(program_vars)
        self.ghosts = set(ghosts)
        self.depth = depth
        self.on_obligation = on_obligation
        self.report = CheckReport()

    # -- paths --------------------------------------------------------------

    def start(self, a, text: Optional[str] = None, origin: str = "annotation") -> _Path:
        text = text if text is not None else assertion_str(a)
        try:
            h = from_assertion(a, avoid=set(self.program_vars))
        except OutsideFragment as exc:
            return _Path(None, text, assertion_vars(a), origin, error=f"outside symbolic fragment: {exc}")
        state = prepare(h, self.program_vars)
        return _Path(state, text, assertion_vars(a), origin, vacuous=state is None)

    def assume(self, path: _Path, cond, positive: bool) -> _Path:
        label = bexp_str(cond) if positive else f"!({bexp_str(cond)})"
        text = f"{path.text} && {label}" if not path.cmds else path.text
        cmds = path.cmds + ([f"assume {label}"] if path.cmds else [])
        out = _Path(path.state, text, path.start_vars, path.origin, cmds, path.error, path.fault, path.vacuous)
        if path.state is None:
            return out
        try:
            atoms = _pure_bexp(cond, positive)
        except OutsideFragment as exc:
            out.state, out.error = None, f"outside symbolic fragment: {exc}"
            return out
        h = path.state.to_heap()
        out.state = prepare(SymbolicHeap(h.existentials, h.pure + tuple(atoms), h.views), self.program_vars)
        out.vacuous = out.state is None
        return out

    # -- obligations ----------------------------------------------------------

    def emit(self, result: Result) -> None:
        self.report.results.append(result)
        if self.on_obligation:
            self.on_obligation(result)

    def target(self, path: _Path, a, kind: Optional[str], pos) -> None:
        if kind is None:
            if path.cmds:
                kind = "triple-step"
            elif path.origin == "loop-exit":
                kind = "post-from-invariant"
            else:
                kind = "implication"
        ob = Obligation(
            kind, pos[0], pos[1], path.text, "; ".join(path.cmds) or None, assertion_str(a)
        )
        if path.error:
            return self.emit(Result(ob, "error", diagnostic=path.error))
        if path.fault:
            return self.emit(Result(ob, "not_proven", diagnostic=path.fault))
        if path.vacuous:
            return self.emit(Result(ob, "proven", ProofTrace("inconsistent", "antecedent has no models")))
        local = assertion_vars(a) - path.start_vars - set(self.program_vars) - self.ghosts
        goal = a
        for v in sorted(local, reverse=True):
            goal = Exists(v, goal)
        try:
            q = from_assertion(goal, avoid=set(self.program_vars))
        except OutsideFragment as exc:
            return self.emit(Result(ob, "error", diagnostic=f"outside symbolic fragment: {exc}"))
        try:
            trace = entails(path.state.to_heap(), q, self.depth, self.program_vars)
        except SearchLimit as exc:
            return self.emit(Result(ob, "error", diagnostic=str(exc), resource_limit=True))
        if trace is None:
            return self.emit(Result(ob, "not_proven", diagnostic="entailment not found"))
        self.emit(Result(ob, "proven", trace))

    # -- walking ----------------------------------------------------------------

    def walk(self, items: list, paths: list) -> list:
        for item in items:
            if isinstance(item, Annot):
                for p in paths:
                    self.target(p, item.assertion, None, (item.line, item.col))
                paths = [self.start(item.assertion)]
            elif isinstance(item, ATOMIC):
                paths = [self.step(p, item) for p in paths]
                paths = [p for p in paths if p is not None]
            elif isinstance(item, If):
                then = self.walk(seq_items(item.then), [self.assume(p, item.cond, True) for p in paths])
                else_ = self.walk(seq_items(item.else_), [self.assume(p, item.cond, False) for p in paths])
                paths = then + else_
            elif isinstance(item, While):
                paths = self.loop(item, paths)
            else:
                raise TypeError(f"unexpected command {item!r}")
        return paths

    def step(self, path: _Path, c) -> Optional[_Path]:
        text = command_str(c)
        if path.state is None:
            return path.advanced(None, text) if not path.vacuous else path
        try:
            state = sym_exec(c, path.state, self.program_vars, self.depth)
        except Fault as exc:
            nxt = path.advanced(None, text)
            nxt.fault = str(exc)
            nxt.vacuous = False
            return nxt
        except SearchLimit as exc:
            nxt = path.advanced(None, text)
            nxt.error = str(exc)
            return nxt
        nxt = path.advanced(state, text)
        return nxt

    def loop(self, w: While, paths: list) -> list:
        pos = (w.line, w.col)
        if w.invariant is None:
            ob = Obligation("invariant-entry", pos[0], pos[1], "", command_str(w), "")
            self.emit(Result(ob, "error", diagnostic="while loop has no invariant"))
            return []
        inv = w.invariant
        for p in paths:
            self.target(p, inv, "invariant-entry", pos)
        cond = bexp_to_assertion(w.cond)
        inv_text = assertion_str(inv)
        body_start = self.start(And(inv, cond), f"{inv_text} && {bexp_str(w.cond)}")
        for p in self.walk(seq_items(w.body), [body_start]):
            self.target(p, inv, "invariant-preserve", pos)
        exit_text = f"{inv_text} && !({bexp_str(w.cond)})"
        return [self.start(And(inv, bexp_to_assertion(BNot(w.cond))), exit_text, origin="loop-exit")]


def invariants(c) -> list:
    out = []
    for item in seq_items(c):
        if isinstance(item, While):
            if item.invariant is not None:
                out.append(item.invariant)
            out.extend(invariants(item.body))
        elif isinstance(item, If):
            out.extend(invariants(item.then))
            out.extend(invariants(item.else_))
    return out


def _ghosts(pre, body, post, program_vars) -> set[str]:
    out = assertion_vars(pre) | assertion_vars(post)
    for inv in invariants(body):
        out |= assertion_vars(inv)
    return out - set(program_vars)


def _program_vars(pre, body, post) -> tuple:
    from .subst import modified_vars

    return tuple(sorted(modified_vars(body)))


def check_triple(
    pre,
    c,
    post,
    program_vars=None,
    depth: Optional[int] = None,
    on_obligation: Optional[Callable[[Result], None]] = None,
    pre_pos=(0, 0),
    post_pos=(0, 0),
) -> CheckReport:
    """Check ``{pre} c {post}``; annotations inside ``c`` split the proof."""
    if program_vars is None:
        program_vars = _program_vars(pre, c, post)
    walker = _Walker(program_vars, _ghosts(pre, c, post, program_vars), depth, on_obligation)
    paths = walker.walk(seq_items(c), [walker.start(pre)])
    for p in paths:
        walker.target(p, post, None, post_pos)
    return walker.report


def check_outline(
    prog: AnnotatedProgram,
    depth: Optional[int] = None,
    on_obligation: Optional[Callable[[Result], None]] = None,
) -> CheckReport:
    """Check every step and implication of a fully annotated program."""
    return check_triple(
        prog.pre,
        prog.body,
        prog.post,
        program_vars=prog.variables,
        depth=depth,
        on_obligation=on_obligation,
        pre_pos=prog.pre_pos,
        post_pos=prog.post_pos,
    )
