"""Canonical text rendering; ``parse(render(node)) == node`` for parser output."""

from __future__ import annotations

from functools import singledispatch

from .ast import (
    Alloc,
    And,
    AnnotatedProgram,
    Annot,
    Assign,
    BAnd,
    BImplies,
    BinOp,
    BNot,
    BoolConst,
    BOr,
    Emp,
    Eps,
    Eq,
    Exists,
    Forall,
    Free,
    If,
    Implies,
    ListRep,
    Lookup,
    Mutate,
    Not,
    Num,
    Or,
    PointsTo,
    Pure,
    SepConj,
    SepImp,
    Seq,
    SeqConcat,
    SeqCons,
    SeqEq,
    SeqRev,
    SeqVar,
    Skip,
    Var,
    While,
)

_ARITH_LEVEL = {"+": 1, "-": 1, "*": 2}
_OP_TEXT = {"+": "+", "-": "-", "*": "×"}


def aexp_str(e, level: int = 0) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinOp):
        mine = _ARITH_LEVEL[e.op]
        text = f"{aexp_str(e.left, mine)} {_OP_TEXT[e.op]} {aexp_str(e.right, mine + 1)}"
        return f"({text})" if mine < level else text
    raise TypeError(f"not an arithmetic expression: {e!r}")


def bexp_str(b, level: int = 0) -> str:
    # levels: 0 implies, 1 or, 2 and, 3 unary
    if isinstance(b, BoolConst):
        return "true" if b.value else "false"
    if isinstance(b, Eq):
        return f"{aexp_str(b.left)} = {aexp_str(b.right)}"
    if isinstance(b, BNot):
        if isinstance(b.inner, Eq):
            return f"{aexp_str(b.inner.left)} != {aexp_str(b.inner.right)}"
        return "!" + bexp_str(b.inner, 3)
    if isinstance(b, BAnd):
        text, mine = f"{bexp_str(b.left, 2)} && {bexp_str(b.right, 3)}", 2
    elif isinstance(b, BOr):
        text, mine = f"{bexp_str(b.left, 1)} || {bexp_str(b.right, 2)}", 1
    elif isinstance(b, BImplies):
        text, mine = f"{bexp_str(b.left, 1)} => {bexp_str(b.right, 0)}", 0
    else:
        raise TypeError(f"not a boolean expression: {b!r}")
    return f"({text})" if mine < level else text


def seq_str(s, level: int = 0) -> str:
    # level 0: concatenation allowed; 1: a single term
    if isinstance(s, Eps):
        return "eps"
    if isinstance(s, SeqVar):
        return s.name
    if isinstance(s, SeqRev):
        return f"rev({seq_str(s.inner)})"
    if isinstance(s, SeqCons):
        return f"{aexp_str(s.head)}.{seq_str(s.tail, 1)}"
    if isinstance(s, SeqConcat):
        text = f"{seq_str(s.left, 1)} ++ {seq_str(s.right, 0)}"
        return f"({text})" if level > 0 else text
    raise TypeError(f"not a sequence expression: {s!r}")


# assertion levels: 0 quantifier, 1 =>, 2 ||, 3 &&, 4 -*, 5 *, 6 unary, 7 atom
def assertion_str(a, level: int = 0) -> str:
    if isinstance(a, Emp):
        return "emp"
    if isinstance(a, Pure):
        if isinstance(a.cond, (BoolConst, Eq)):
            return bexp_str(a.cond)
        return f"({bexp_str(a.cond)})"
    if isinstance(a, PointsTo):
        return f"{aexp_str(a.addr)} |-> {aexp_str(a.value)}"
    if isinstance(a, ListRep):
        return f"listrep({seq_str(a.seq)}, {aexp_str(a.start)}, {aexp_str(a.end)})"
    if isinstance(a, SeqEq):
        return f"{seq_str(a.left)} = {seq_str(a.right)}"
    if isinstance(a, Not):
        inner = a.inner
        if isinstance(inner, Pure) and isinstance(inner.cond, Eq):
            return f"{aexp_str(inner.cond.left)} != {aexp_str(inner.cond.right)}"
        if isinstance(inner, SeqEq):
            return f"{seq_str(inner.left)} != {seq_str(inner.right)}"
        return "!" + assertion_str(inner, 6)
    if isinstance(a, (Exists, Forall)):
        kw = "exists" if isinstance(a, Exists) else "forall"
        text, mine = f"{kw} {a.var}. {assertion_str(a.body, 0)}", 0
    elif isinstance(a, Implies):
        text, mine = f"{assertion_str(a.left, 2)} => {assertion_str(a.right, 0)}", 1
    elif isinstance(a, Or):
        text, mine = f"{assertion_str(a.left, 2)} || {assertion_str(a.right, 3)}", 2
    elif isinstance(a, And):
        text, mine = f"{assertion_str(a.left, 3)} && {assertion_str(a.right, 4)}", 3
    elif isinstance(a, SepImp):
        text, mine = f"{assertion_str(a.left, 5)} -* {assertion_str(a.right, 4)}", 4
    elif isinstance(a, SepConj):
        text, mine = f"{assertion_str(a.left, 6)} * {assertion_str(a.right, 5)}", 5
    else:
        raise TypeError(f"not an assertion: {a!r}")
    return f"({text})" if mine < level else text


def command_str(c, nested: bool = False) -> str:
    if isinstance(c, Skip):
        return "skip"
    if isinstance(c, Assign):
        return f"{c.var} := {aexp_str(c.expr)}"
    if isinstance(c, Alloc):
        return f"{c.var} := cons({', '.join(aexp_str(e) for e in c.args)})"
    if isinstance(c, Lookup):
        return f"{c.var} := [{aexp_str(c.addr)}]"
    if isinstance(c, Mutate):
        return f"[{aexp_str(c.addr)}] := {aexp_str(c.value)}"
    if isinstance(c, Free):
        return f"free({aexp_str(c.addr)})"
    if isinstance(c, Annot):
        return "{" + assertion_str(c.assertion) + "}"
    if isinstance(c, If):
        return f"if {bexp_str(c.cond)} then {command_str(c.then)} else {command_str(c.else_)} fi"
    if isinstance(c, While):
        inv = "" if c.invariant is None else " invariant {" + assertion_str(c.invariant) + "}"
        return f"while {bexp_str(c.cond)}{inv} do {command_str(c.body)} od"
    if isinstance(c, Seq):
        first = command_str(c.first)
        if isinstance(c.first, Seq):
            first = f"({first})"
        return f"{first}; {command_str(c.second)}"
    raise TypeError(f"not a command: {c!r}")


@singledispatch
def render(node) -> str:
    """Render any AST node in the concrete syntax."""
    raise TypeError(f"cannot render {node!r}")


for _t in (Num, Var, BinOp):
    render.register(_t, lambda n: aexp_str(n))
for _t in (BoolConst, Eq, BNot, BAnd, BOr, BImplies):
    render.register(_t, lambda n: bexp_str(n))
for _t in (Eps, SeqVar, SeqCons, SeqConcat, SeqRev):
    render.register(_t, lambda n: seq_str(n))
for _t in (Pure, Emp, PointsTo, SepConj, SepImp, And, Or, Implies, Not, Exists, Forall, ListRep, SeqEq):
    render.register(_t, lambda n: assertion_str(n))
for _t in (Skip, Assign, Seq, If, While, Alloc, Lookup, Mutate, Free, Annot):
    render.register(_t, lambda n: command_str(n))


@render.register
def _(p: AnnotatedProgram) -> str:
    lines = [f"vars {' '.join(p.variables)};", "{" + assertion_str(p.pre) + "}"]
    lines.append(command_str(p.body))
    lines.append("{" + assertion_str(p.post) + "}")
    return "\n".join(lines) + "\n"
