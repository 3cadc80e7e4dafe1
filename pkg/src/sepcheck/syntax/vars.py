"""Free variables and literal constants of expressions and assertions."""

from __future__ import annotations

from .ast import (
    And,
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
    Implies,
    ListRep,
    Not,
    Num,
    Or,
    PointsTo,
    Pure,
    SepConj,
    SepImp,
    SeqConcat,
    SeqCons,
    SeqEq,
    SeqRev,
    SeqVar,
    Var,
)


def aexp_vars(e) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, BinOp):
        return aexp_vars(e.left) | aexp_vars(e.right)
    return set()


def bexp_vars(b) -> set[str]:
    if isinstance(b, BoolConst):
        return set()
    if isinstance(b, Eq):
        return aexp_vars(b.left) | aexp_vars(b.right)
    if isinstance(b, BNot):
        return bexp_vars(b.inner)
    return bexp_vars(b.left) | bexp_vars(b.right)


def seq_vars(s) -> set[str]:
    if isinstance(s, Eps):
        return set()
    if isinstance(s, SeqVar):
        return {s.name}
    if isinstance(s, SeqCons):
        return aexp_vars(s.head) | seq_vars(s.tail)
    if isinstance(s, SeqConcat):
        return seq_vars(s.left) | seq_vars(s.right)
    if isinstance(s, SeqRev):
        return seq_vars(s.inner)
    raise TypeError(f"not a sequence expression: {s!r}")


def assertion_vars(a) -> set[str]:
    """Free variables of ``a``: program, ghost and sequence variables alike."""
    if isinstance(a, Emp):
        return set()
    if isinstance(a, Pure):
        return bexp_vars(a.cond)
    if isinstance(a, PointsTo):
        return aexp_vars(a.addr) | aexp_vars(a.value)
    if isinstance(a, ListRep):
        return seq_vars(a.seq) | aexp_vars(a.start) | aexp_vars(a.end)
    if isinstance(a, SeqEq):
        return seq_vars(a.left) | seq_vars(a.right)
    if isinstance(a, Not):
        return assertion_vars(a.inner)
    if isinstance(a, (Exists, Forall)):
        return assertion_vars(a.body) - {a.var}
    if isinstance(a, (SepConj, SepImp, And, Or, Implies)):
        return assertion_vars(a.left) | assertion_vars(a.right)
    raise TypeError(f"not an assertion: {a!r}")


def free_vars(node) -> set[str]:
    """Free variables of any expression or assertion node."""
    if isinstance(node, (Num, Var, BinOp)):
        return aexp_vars(node)
    if isinstance(node, (BoolConst, Eq, BNot, BAnd, BOr, BImplies)):
        return bexp_vars(node)
    if isinstance(node, (Eps, SeqVar, SeqCons, SeqConcat, SeqRev)):
        return seq_vars(node)
    return assertion_vars(node)


def bound_vars(a) -> set[str]:
    if isinstance(a, (Exists, Forall)):
        return {a.var} | bound_vars(a.body)
    if isinstance(a, Not):
        return bound_vars(a.inner)
    if isinstance(a, (SepConj, SepImp, And, Or, Implies)):
        return bound_vars(a.left) | bound_vars(a.right)
    return set()


def literals(node) -> set[int]:
    """Every integer literal occurring anywhere in ``node``."""
    out: set[int] = set()

    def walk(n):
        if isinstance(n, Num):
            out.add(n.value)
        elif isinstance(n, tuple):
            for x in n:
                walk(x)
        elif hasattr(n, "__dataclass_fields__"):
            for f in n.__dataclass_fields__:
                walk(getattr(n, f))

    walk(node)
    return out
