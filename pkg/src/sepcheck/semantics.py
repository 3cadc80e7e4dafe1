"""Evaluation and execution for the heap language.

Stores map variable names to integers and heaps map locations (integers
>= 1) to integers; 0 is the null pointer and is never allocated.  Integers
are mathematical, but any intermediate result that leaves the signed 64-bit
range is reported as an ``EvalError`` instead of wrapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .syntax.ast import (
    Alloc,
    Annot,
    Assign,
    BAnd,
    BImplies,
    BinOp,
    BNot,
    BoolConst,
    BOr,
    Eq,
    Free,
    If,
    Lookup,
    Mutate,
    Num,
    Seq,
    Skip,
    Var,
    While,
)
from .syntax.printer import command_str

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


class EvalError(Exception):
    """An expression could not be evaluated (unbound variable or overflow)."""


@dataclass
class State:
    store: dict = field(default_factory=dict)
    heap: dict = field(default_factory=dict)

    def copy(self) -> "State":
        return State(dict(self.store), dict(self.heap))

    def key(self) -> tuple:
        return (tuple(sorted(self.store.items())), tuple(sorted(self.heap.items())))

    def __str__(self) -> str:
        return state_str(self)


@dataclass(frozen=True)
class Final:
    state: State


@dataclass(frozen=True)
class Abort:
    step: int  # number of atomic steps completed before the fault
    address: int
    command: object

    def describe(self) -> str:
        return f"abort at {command_str(self.command)} (address {self.address} not allocated)"


@dataclass(frozen=True)
class OutOfFuel:
    state: State
    steps: int


Outcome = Union[Final, Abort, OutOfFuel]


def _check(v: int) -> int:
    if v < INT_MIN or v > INT_MAX:
        raise EvalError(f"integer overflow: {v} is outside the 64-bit range")
    return v


def eval_aexp(store: dict, e) -> int:
    if isinstance(e, Num):
        return _check(e.value)
    if isinstance(e, Var):
        try:
            v = store[e.name]
        except KeyError:
            raise EvalError(f"unbound variable {e.name}") from None
        if not isinstance(v, int):
            raise EvalError(f"variable {e.name} does not hold an integer")
        return v
    if isinstance(e, BinOp):
        a = eval_aexp(store, e.left)
        b = eval_aexp(store, e.right)
        if e.op == "+":
            return _check(a + b)
        if e.op == "-":
            return _check(a - b)
        if e.op == "*":
            return _check(a * b)
    raise TypeError(f"not an arithmetic expression: {e!r}")


def eval_bexp(store: dict, b) -> bool:
    if isinstance(b, BoolConst):
        return b.value
    if isinstance(b, Eq):
        return eval_aexp(store, b.left) == eval_aexp(store, b.right)
    if isinstance(b, BNot):
        return not eval_bexp(store, b.inner)
    if isinstance(b, BAnd):
        return eval_bexp(store, b.left) and eval_bexp(store, b.right)
    if isinstance(b, BOr):
        return eval_bexp(store, b.left) or eval_bexp(store, b.right)
    if isinstance(b, BImplies):
        return (not eval_bexp(store, b.left)) or eval_bexp(store, b.right)
    raise TypeError(f"not a boolean expression: {b!r}")


def restrict(heap: dict, locations) -> dict:
    """``h`` restricted to ``dom h`` intersected with ``locations``."""
    keep = set(locations)
    return {l: v for l, v in heap.items() if l in keep}


def allocate(heap: dict, n: int, base: int = 1) -> int:
    """Smallest ``l >= base`` such that ``l .. l+n-1`` are all unallocated."""
    l = max(base, 1)
    while True:
        clash = [a for a in range(l, l + n) if a in heap]
        if not clash:
            return l
        l = max(clash) + 1


def step(c, st: State, alloc_base: int = 1) -> Optional[Abort]:
    """Run one atomic command in place; returns an ``Abort`` on a heap fault."""
    s, h = st.store, st.heap
    if isinstance(c, Skip):
        return None
    if isinstance(c, Assign):
        s[c.var] = eval_aexp(s, c.expr)
        return None
    if isinstance(c, Alloc):
        vals = [eval_aexp(s, e) for e in c.args]
        l = allocate(h, len(vals), alloc_base)
        for k, v in enumerate(vals):
            h[l + k] = v
        s[c.var] = l
        return None
    if isinstance(c, Lookup):
        a = eval_aexp(s, c.addr)
        if a not in h:
            return Abort(0, a, c)
        s[c.var] = h[a]
        return None
    if isinstance(c, Mutate):
        a = eval_aexp(s, c.addr)
        if a not in h:
            return Abort(0, a, c)
        h[a] = eval_aexp(s, c.value)
        return None
    if isinstance(c, Free):
        a = eval_aexp(s, c.addr)
        if a not in h:
            return Abort(0, a, c)
        del h[a]
        return None
    raise TypeError(f"not an atomic command: {c!r}")


def exec_command(c, s0: State, fuel: int = 10_000, alloc_base: int = 1) -> tuple[Outcome, list]:
    """Execute ``c`` from ``s0``.

    Returns the outcome and the trace: the state after every atomic command,
    in order.  Each atomic command and each loop test costs one unit of fuel.
    ``s0`` is not modified.
    """
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    if alloc_base < 1:
        raise ValueError("alloc_base must be at least 1")
    st = s0.copy()
    trace: list[State] = []
    stack = [c]
    used = 0
    while stack:
        cur = stack.pop()
        if isinstance(cur, Seq):
            stack.append(cur.second)
            stack.append(cur.first)
        elif isinstance(cur, Annot):
            continue
        elif isinstance(cur, If):
            stack.append(cur.then if eval_bexp(st.store, cur.cond) else cur.else_)
        elif isinstance(cur, While):
            if used >= fuel:
                return OutOfFuel(st, used), trace
            used += 1
            if eval_bexp(st.store, cur.cond):
                stack.append(cur)
                stack.append(cur.body)
        else:
            if used >= fuel:
                return OutOfFuel(st, used), trace
            used += 1
            fault = step(cur, st, alloc_base)
            if fault is not None:
                return Abort(len(trace), fault.address, cur), trace
            trace.append(st.copy())
    return Final(st), trace


def _map_str(m: dict, sep: str, order) -> str:
    return "{" + ", ".join(f"{k}{sep}{_value_str(m[k])}" for k in order) + "}"


def _value_str(v) -> str:
    if isinstance(v, tuple):
        return "[" + " ".join(str(x) for x in v) + "]"
    return str(v)


def state_str(st: State) -> str:
    """One trace line: ``store {x:10, y:1} heap {10:1, 11:2}``."""
    return f"store {_map_str(st.store, ':', list(st.store))} heap {_map_str(st.heap, ':', sorted(st.heap))}"


def trace_lines(s0: State, outcome: Outcome, trace: list) -> list[str]:
    """The initial state, every traced state, then the outcome."""
    lines = [state_str(s0)] + [state_str(t) for t in trace]
    if isinstance(outcome, Abort):
        lines.append(outcome.describe())
    elif isinstance(outcome, OutOfFuel):
        lines.append(f"out of fuel after {outcome.steps} steps")
    return lines
