"""Polynomial normal form for integer terms and item lists for sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..syntax.ast import BinOp, Eps, Num, SeqConcat, SeqCons, SeqRev, SeqVar, Var


class Poly:
    """A polynomial with integer coefficients over variable names.

    Monomials are sorted tuples of names; ``()`` is the constant monomial.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple, int] | None = None):
        items = tuple(sorted((m, c) for m, c in (terms or {}).items() if c))
        self.terms = items
        self._hash = hash(items)

    @staticmethod
    def const(n: int) -> "Poly":
        return Poly({(): n})

    @staticmethod
    def var(name: str) -> "Poly":
        return Poly({(name,): 1})

    def _dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "Poly") -> "Poly":
        d = self._dict()
        for m, c in other.terms:
            d[m] = d.get(m, 0) + c
        return Poly(d)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        d: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = tuple(sorted(m1 + m2))
                d[m] = d.get(m, 0) + c1 * c2
        return Poly(d)

    def scale(self, k: int) -> "Poly":
        return Poly({m: c * k for m, c in self.terms})

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Poly") -> bool:
        return self.terms < other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(m == () for m, _ in self.terms)

    def const_value(self) -> int:
        return dict(self.terms).get((), 0)

    def vars(self) -> set[str]:
        return {v for m, _ in self.terms for v in m}

    def linear_coeff(self, v: str) -> int | None:
        """Coefficient of ``v`` when it occurs only as the linear monomial."""
        coeff = None
        for m, c in self.terms:
            if v in m:
                if m != (v,):
                    return None
                coeff = c
        return coeff

    def subst(self, mapping: Mapping[str, "Poly"]) -> "Poly":
        if not mapping or not (self.vars() & mapping.keys()):
            return self
        out = Poly()
        for m, c in self.terms:
            t = Poly.const(c)
            for v in m:
                t = t * (mapping[v] if v in mapping else Poly.var(v))
            out = out + t
        return out

    def canonical(self) -> "Poly":
        """``self`` or ``-self``, whichever has a positive leading coefficient."""
        if self.terms and self.terms[-1][1] < 0:
            return -self
        return self

    def to_aexp(self):
        if not self.terms:
            return Num(0)
        ordered = sorted(self.terms, key=lambda mc: (mc[0] == (), mc[1] < 0, len(mc[0]), mc[0]))
        out = None
        for m, c in ordered:
            if m == ():
                mag = Num(abs(c))
            else:
                mag = None
                for v in m:
                    mag = Var(v) if mag is None else BinOp("*", mag, Var(v))
                if abs(c) != 1:
                    mag = BinOp("*", Num(abs(c)), mag)
            if out is None:
                if c < 0:
                    out = Num(c) if m == () else BinOp("-", Num(0), mag)
                else:
                    out = mag
            else:
                out = BinOp("+" if c > 0 else "-", out, mag)
        return out

    def __str__(self) -> str:
        from ..syntax.printer import aexp_str

        return aexp_str(self.to_aexp())

    def __repr__(self) -> str:
        return f"Poly({self})"


def poly(e) -> Poly:
    """Normal form of an arithmetic expression."""
    if isinstance(e, Num):
        return Poly.const(e.value)
    if isinstance(e, Var):
        return Poly.var(e.name)
    if isinstance(e, BinOp):
        a, b = poly(e.left), poly(e.right)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        return a * b
    raise TypeError(f"not an arithmetic expression: {e!r}")


ZERO = Poly()


# -- sequences ----------------------------------------------------------------


@dataclass(frozen=True)
class Elem:
    value: Poly

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class SVar:
    name: str
    rev: bool = False

    def flip(self) -> "SVar":
        return SVar(self.name, not self.rev)

    def __str__(self) -> str:
        return f"rev({self.name})" if self.rev else self.name


def reverse_items(items: tuple) -> tuple:
    return tuple(i.flip() if isinstance(i, SVar) else i for i in reversed(items))


def items_of(s) -> tuple:
    """Flatten a sequence expression into items, pushing reversal to variables."""
    if isinstance(s, Eps):
        return ()
    if isinstance(s, SeqVar):
        return (SVar(s.name),)
    if isinstance(s, SeqCons):
        return (Elem(poly(s.head)),) + items_of(s.tail)
    if isinstance(s, SeqConcat):
        return items_of(s.left) + items_of(s.right)
    if isinstance(s, SeqRev):
        return reverse_items(items_of(s.inner))
    raise TypeError(f"not a sequence expression: {s!r}")


def items_to_seq(items: tuple):
    """Canonical sequence expression: elements cons'd, runs concatenated to the right."""
    acc = None
    for it in reversed(items):
        if isinstance(it, Elem):
            acc = SeqCons(it.value.to_aexp(), acc if acc is not None else Eps())
        else:
            s = SeqRev(SeqVar(it.name)) if it.rev else SeqVar(it.name)
            acc = s if acc is None else SeqConcat(s, acc)
    return acc if acc is not None else Eps()


def seq_normalize(s):
    """Rewrite with rev(eps) = eps, rev(a.s) = rev(s) ++ a.eps,
    rev(s1 ++ s2) = rev(s2) ++ rev(s1) and rev(rev(s)) = s, flattening ``++``."""
    return items_to_seq(items_of(s))


def items_vars(items: tuple) -> set[str]:
    out: set[str] = set()
    for it in items:
        if isinstance(it, Elem):
            out |= it.value.vars()
        else:
            out.add(it.name)
    return out


def items_str(items: tuple) -> str:
    from ..syntax.printer import seq_str

    return seq_str(items_to_seq(items))
