"""Backward rules: weakest preconditions as assertion ASTs."""

from __future__ import annotations

from ..syntax.ast import (
    Alloc,
    Assign,
    Exists,
    Forall,
    Free,
    Lookup,
    Mutate,
    PointsTo,
    SepConj,
    SepImp,
    Skip,
    Var,
    offset,
    sep_all,
)
from ..syntax.vars import aexp_vars, assertion_vars
from .subst import fresh_name, subst


def wp(c, q):
    """Precondition from the backward rule for ``c``.

    mutation ``(e |-> -) * ((e |-> e') -* q)``, lookup
    ``exists x'. (e |-> x') * ((e |-> x') -* q[x'/x])``, allocation
    ``forall x'. (x' |-> e1, ..., ek) -* q[x'/x]``, deallocation
    ``(e |-> -) * q`` and assignment ``q[e/x]``.
    """
    if isinstance(c, Skip):
        return q
    if isinstance(c, Assign):
        return subst(q, [(c.var, c.expr)])
    if isinstance(c, Mutate):
        v = fresh_name("v", aexp_vars(c.addr) | aexp_vars(c.value) | assertion_vars(q))
        return SepConj(
            Exists(v, PointsTo(c.addr, Var(v))),
            SepImp(PointsTo(c.addr, c.value), q),
        )
    if isinstance(c, Free):
        v = fresh_name("v", aexp_vars(c.addr) | assertion_vars(q))
        return SepConj(Exists(v, PointsTo(c.addr, Var(v))), q)
    if isinstance(c, Lookup):
        x1 = fresh_name(c.var, aexp_vars(c.addr) | assertion_vars(q) | {c.var})
        cell = PointsTo(c.addr, Var(x1))
        return Exists(x1, SepConj(cell, SepImp(cell, subst(q, [(c.var, Var(x1))]))))
    if isinstance(c, Alloc):
        used = assertion_vars(q) | {c.var}
        for e in c.args:
            used |= aexp_vars(e)
        x1 = fresh_name(c.var, used)
        block = sep_all([PointsTo(offset(Var(x1), k), e) for k, e in enumerate(c.args)])
        return Forall(x1, SepImp(block, subst(q, [(c.var, Var(x1))])))
    raise TypeError(f"no backward rule for {c!r}")
