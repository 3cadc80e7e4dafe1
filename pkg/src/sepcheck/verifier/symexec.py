"""Forward symbolic execution of atomic commands over symbolic heaps."""

from __future__ import annotations

from typing import Optional

from ..symbolic.entail import find_cell
from ..symbolic.heap import PEq, PT, Normalized, SymbolicHeap, View, fresh, prepare, rename_heap
from ..symbolic.terms import Poly, poly
from ..syntax.ast import Alloc, Annot, Assign, Free, Lookup, Mutate, Skip
from ..syntax.printer import command_str
from ..syntax.vars import aexp_vars


class Fault(Exception):
    """No proof that the command cannot abort."""

    def __init__(self, command, message: str = "possible abort"):
        super().__init__(f"{message} at {command_str(command)}")
        self.command = command


def _names(S: Normalized) -> set[str]:
    return S.to_heap().vars() | set(S.existentials)


def _floyd(S: Normalized, x: str, rhs: Poly, program_vars, extra=()) -> Optional[Normalized]:
    """``exists x'. S[x'/x] && x = rhs[x'/x]`` (plus ``extra`` equalities on x)."""
    h = S.to_heap()
    x1 = fresh(x, h.vars() | rhs.vars() | set(program_vars) | set(S.existentials))
    h1 = rename_heap(h, {x: x1})
    m = {x: Poly.var(x1)}
    eqs = [PEq(Poly.var(x) - rhs.subst(m))] + [PEq(Poly.var(x) - e.subst(m)) for e in extra]
    return prepare(
        SymbolicHeap(h1.existentials | {x1}, h1.pure + tuple(eqs), h1.views), program_vars
    )


def sym_exec(c, S: Normalized, program_vars=(), depth=None) -> Optional[Normalized]:
    """Strongest postcondition of an atomic command.

    Returns None when the result is inconsistent (the command is unreachable)
    and raises ``Fault`` when the footprint of a heap command cannot be found.
    """
    if isinstance(c, (Skip, Annot)):
        return S
    if isinstance(c, Assign):
        return _floyd(S, c.var, poly(c.expr), program_vars)
    if isinstance(c, Alloc):
        h = S.to_heap()
        used = h.vars() | set(program_vars) | set(S.existentials)
        for e in c.args:
            used |= aexp_vars(e)
        x1 = fresh(c.var, used)
        h1 = rename_heap(h, {c.var: x1})
        m = {c.var: Poly.var(x1)}
        base = Poly.var(c.var)
        cells = tuple(
            PT(base + Poly.const(k), poly(e).subst(m)) for k, e in enumerate(c.args)
        )
        views = tuple(View(v.atoms + cells, v.junk) for v in h1.views)
        return prepare(SymbolicHeap(h1.existentials | {x1}, h1.pure, views), program_vars)
    if isinstance(c, Lookup):
        addr = poly(c.addr)
        values = []
        S = S.copy()
        for i in range(len(S.views)):
            found = find_cell(S, i, addr, depth, _names(S) | set(program_vars))
            if found is None:
                continue
            S, frame, cell, _steps = found
            S.views = list(S.views)
            S.views[i] = View(frame + (cell,), S.views[i].junk)
            values.append(cell.value)
        if not values:
            raise Fault(c)
        return _floyd(S, c.var, values[0], program_vars, values[1:])
    if isinstance(c, (Mutate, Free)):
        addr = poly(c.addr)
        S = S.copy()
        for i in range(len(S.views)):
            found = find_cell(S, i, addr, depth, _names(S) | set(program_vars))
            if found is None:
                raise Fault(c)
            S, frame, cell, _steps = found
            S.views = list(S.views)
            if isinstance(c, Mutate):
                S.views[i] = View(frame + (PT(cell.addr, poly(c.value)),), S.views[i].junk)
            else:
                S.views[i] = View(frame, S.views[i].junk)
        return prepare(S.to_heap(), program_vars)
    raise TypeError(f"not an atomic command: {c!r}")
