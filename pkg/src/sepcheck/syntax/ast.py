"""Abstract syntax for the heap language, its assertions and annotated programs.

All nodes are frozen dataclasses, so they hash and compare structurally.
Source positions, where recorded, are excluded from comparison.

Sequence variables are written with a leading ``@`` (``@alpha``) and live in
the same namespace as integer variables; the prefix is what tells them apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

NULL = 0


# -- arithmetic expressions ---------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of "+", "-", "*"
    left: AExpr
    right: AExpr


AExpr = Union[Num, Var, BinOp]

ARITH_OPS = ("+", "-", "*")


# -- boolean expressions ------------------------------------------------------


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Eq:
    left: AExpr
    right: AExpr


@dataclass(frozen=True)
class BNot:
    inner: BExpr


@dataclass(frozen=True)
class BAnd:
    left: BExpr
    right: BExpr


@dataclass(frozen=True)
class BOr:
    left: BExpr
    right: BExpr


@dataclass(frozen=True)
class BImplies:
    left: BExpr
    right: BExpr


BExpr = Union[BoolConst, Eq, BNot, BAnd, BOr, BImplies]


# -- sequence expressions -----------------------------------------------------


@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class SeqVar:
    name: str  # includes the leading "@"


@dataclass(frozen=True)
class SeqCons:
    head: AExpr
    tail: SeqExpr


@dataclass(frozen=True)
class SeqConcat:
    left: SeqExpr
    right: SeqExpr


@dataclass(frozen=True)
class SeqRev:
    inner: SeqExpr


SeqExpr = Union[Eps, SeqVar, SeqCons, SeqConcat, SeqRev]


# -- assertions ---------------------------------------------------------------


@dataclass(frozen=True)
class Pure:
    cond: BExpr


@dataclass(frozen=True)
class Emp:
    pass


@dataclass(frozen=True)
class PointsTo:
    addr: AExpr
    value: AExpr


@dataclass(frozen=True)
class SepConj:
    left: Assertion
    right: Assertion


@dataclass(frozen=True)
class SepImp:
    left: Assertion
    right: Assertion


@dataclass(frozen=True)
class And:
    left: Assertion
    right: Assertion


@dataclass(frozen=True)
class Or:
    left: Assertion
    right: Assertion


@dataclass(frozen=True)
class Implies:
    left: Assertion
    right: Assertion


@dataclass(frozen=True)
class Not:
    inner: Assertion


@dataclass(frozen=True)
class Exists:
    var: str
    body: Assertion


@dataclass(frozen=True)
class Forall:
    var: str
    body: Assertion


@dataclass(frozen=True)
class ListRep:
    seq: SeqExpr
    start: AExpr
    end: AExpr


@dataclass(frozen=True)
class SeqEq:
    left: SeqExpr
    right: SeqExpr


Assertion = Union[
    Pure, Emp, PointsTo, SepConj, SepImp, And, Or, Implies, Not, Exists, Forall, ListRep, SeqEq
]

TRUE = Pure(BoolConst(True))
FALSE = Pure(BoolConst(False))


# -- commands -----------------------------------------------------------------


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    expr: AExpr


@dataclass(frozen=True)
class Seq:
    first: Command
    second: Command


@dataclass(frozen=True)
class If:
    cond: BExpr
    then: Command
    else_: Command


@dataclass(frozen=True)
class While:
    cond: BExpr
    invariant: Optional[Assertion]
    body: Command
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Alloc:
    var: str
    args: tuple[AExpr, ...]


@dataclass(frozen=True)
class Lookup:
    var: str
    addr: AExpr


@dataclass(frozen=True)
class Mutate:
    addr: AExpr
    value: AExpr


@dataclass(frozen=True)
class Free:
    addr: AExpr


@dataclass(frozen=True)
class Annot:
    """An assertion written between two commands; executes as a no-op."""

    assertion: Assertion
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


Command = Union[Skip, Assign, Seq, If, While, Alloc, Lookup, Mutate, Free, Annot]

ATOMIC = (Skip, Assign, Alloc, Lookup, Mutate, Free)
HEAP_COMMANDS = (Alloc, Lookup, Mutate, Free)


@dataclass(frozen=True)
class AnnotatedProgram:
    variables: tuple[str, ...]
    pre: Assertion
    body: Command
    post: Assertion
    pre_pos: tuple[int, int] = field(default=(0, 0), compare=False)
    post_pos: tuple[int, int] = field(default=(0, 0), compare=False)


def is_seq_name(name: str) -> bool:
    return name.startswith("@")


def seq_items(c: Command) -> list[Command]:
    """Flatten nested ``Seq`` nodes into a list, left to right."""
    if isinstance(c, Seq):
        return seq_items(c.first) + seq_items(c.second)
    return [c]


def make_seq(items: list[Command]) -> Command:
    """Right-nested sequence of ``items``; the parser's canonical shape."""
    if not items:
        return Skip()
    out = items[-1]
    for c in reversed(items[:-1]):
        out = Seq(c, out)
    return out


def sep_all(parts: list[Assertion]) -> Assertion:
    if not parts:
        return Emp()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = SepConj(p, out)
    return out


def and_all(parts: list[Assertion]) -> Assertion:
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def add(a: AExpr, b: AExpr) -> AExpr:
    return BinOp("+", a, b)


def offset(base: AExpr, k: int) -> AExpr:
    """``base + k`` for the multi-cell points-to sugar (``base`` itself when k = 0)."""
    return base if k == 0 else BinOp("+", base, Num(k))


def bexp_to_assertion(b: BExpr) -> Assertion:
    """Lift a program condition into the assertion language, node for node."""
    if isinstance(b, (BoolConst, Eq)):
        return Pure(b)
    if isinstance(b, BNot):
        return Not(bexp_to_assertion(b.inner))
    if isinstance(b, BAnd):
        return And(bexp_to_assertion(b.left), bexp_to_assertion(b.right))
    if isinstance(b, BOr):
        return Or(bexp_to_assertion(b.left), bexp_to_assertion(b.right))
    if isinstance(b, BImplies):
        return Implies(bexp_to_assertion(b.left), bexp_to_assertion(b.right))
    raise TypeError(f"not a boolean expression: {b!r}")
