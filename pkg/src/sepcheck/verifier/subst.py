"""Capture-avoiding substitution, modified variables and free variables."""

from __future__ import annotations

from ..syntax.ast import (
    Alloc,
    And,
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
    is_seq_name,
)
from ..syntax.vars import assertion_vars, free_vars


def fresh_name(base: str, avoid: set[str]) -> str:
    """``base`` with primes appended until it avoids ``avoid``."""
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def _aexp(e, m: dict):
    if isinstance(e, Var):
        return m.get(e.name, e)
    if isinstance(e, BinOp):
        return BinOp(e.op, _aexp(e.left, m), _aexp(e.right, m))
    return e


def _bexp(b, m: dict):
    if isinstance(b, BoolConst):
        return b
    if isinstance(b, Eq):
        return Eq(_aexp(b.left, m), _aexp(b.right, m))
    if isinstance(b, BNot):
        return BNot(_bexp(b.inner, m))
    return type(b)(_bexp(b.left, m), _bexp(b.right, m))


def _seq(s, m: dict):
    if isinstance(s, Eps):
        return s
    if isinstance(s, SeqVar):
        return m.get(s.name, s)
    if isinstance(s, SeqCons):
        return SeqCons(_aexp(s.head, m), _seq(s.tail, m))
    if isinstance(s, SeqConcat):
        return SeqConcat(_seq(s.left, m), _seq(s.right, m))
    if isinstance(s, SeqRev):
        return SeqRev(_seq(s.inner, m))
    raise TypeError(f"not a sequence expression: {s!r}")


def _assertion(a, m: dict):
    if not m:
        return a
    if isinstance(a, Emp):
        return a
    if isinstance(a, Pure):
        return Pure(_bexp(a.cond, m))
    if isinstance(a, PointsTo):
        return PointsTo(_aexp(a.addr, m), _aexp(a.value, m))
    if isinstance(a, ListRep):
        return ListRep(_seq(a.seq, m), _aexp(a.start, m), _aexp(a.end, m))
    if isinstance(a, SeqEq):
        return SeqEq(_seq(a.left, m), _seq(a.right, m))
    if isinstance(a, Not):
        return Not(_assertion(a.inner, m))
    if isinstance(a, (SepConj, SepImp, And, Or, Implies)):
        return type(a)(_assertion(a.left, m), _assertion(a.right, m))
    if isinstance(a, (Exists, Forall)):
        inner = {k: v for k, v in m.items() if k != a.var}
        body_free = assertion_vars(a.body)
        inner = {k: v for k, v in inner.items() if k in body_free}
        if not inner:
            return a
        incoming = set().union(*(free_vars(v) for v in inner.values()))
        var, body = a.var, a.body
        if var in incoming:
            new = fresh_name(var, incoming | body_free | set(inner))
            renamed = SeqVar(new) if is_seq_name(var) else Var(new)
            body = _assertion(body, {var: renamed})
            var = new
        return type(a)(var, _assertion(body, inner))
    raise TypeError(f"not an assertion: {a!r}")


def subst(node, replacements):
    """Simultaneously replace variables in ``node``.

    ``replacements`` is a list of ``(name, expr)`` pairs; sequence variables
    map to sequence expressions.  Bound variables are renamed by priming
    whenever a replacement would otherwise be captured.
    """
    m = dict(replacements)
    if isinstance(node, (Num, Var, BinOp)):
        return _aexp(node, m)
    if isinstance(node, (BoolConst, Eq, BNot, BAnd, BOr, BImplies)):
        return _bexp(node, m)
    if isinstance(node, (Eps, SeqVar, SeqCons, SeqConcat, SeqRev)):
        return _seq(node, m)
    return _assertion(node, m)


def modified_vars(c) -> set[str]:
    """Store variables a command may assign."""
    if isinstance(c, (Assign, Alloc, Lookup)):
        return {c.var}
    if isinstance(c, Seq):
        return modified_vars(c.first) | modified_vars(c.second)
    if isinstance(c, If):
        return modified_vars(c.then) | modified_vars(c.else_)
    if isinstance(c, While):
        return modified_vars(c.body)
    if isinstance(c, (Skip, Mutate, Free, Annot)):
        return set()
    raise TypeError(f"not a command: {c!r}")


def free_assertion_vars(a) -> set[str]:
    return assertion_vars(a)
