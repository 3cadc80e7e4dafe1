"""Symbolic heaps, the pure-fact store and normalization.

A symbolic heap is ``exists X. Pi && (V1 && ... && Vn)`` where ``Pi`` is a set
of pure atoms and each view ``Vi`` is a ``*``-conjunction of spatial atoms
describing the whole heap.  A view marked ``junk`` additionally allows
cells it does not mention (``... * true``).  Most heaps have one view;
several arise from ``&&`` between spatial formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from ..syntax.ast import (
    And,
    BAnd,
    BImplies,
    BNot,
    BoolConst,
    BOr,
    Emp,
    Eq,
    Exists,
    ListRep,
    Not,
    PointsTo,
    Pure,
    SepConj,
    SeqEq,
    SeqVar,
    TRUE,
    Var,
    and_all,
    is_seq_name,
    sep_all,
)
from ..syntax.vars import assertion_vars, bound_vars
from .terms import (
    Elem,
    Poly,
    SVar,
    ZERO,
    items_of,
    items_str,
    items_to_seq,
    items_vars,
    poly,
    reverse_items,
)


class OutsideFragment(Exception):
    """The assertion has no symbolic-heap form."""


# -- atoms ----------------------------------------------------------------


@dataclass(frozen=True)
class PT:
    addr: Poly
    value: Poly

    def __str__(self) -> str:
        return f"{self.addr} |-> {self.value}"


@dataclass(frozen=True)
class LS:
    seq: tuple
    start: Poly
    end: Poly

    def __str__(self) -> str:
        return f"listrep({items_str(self.seq)}, {self.start}, {self.end})"


@dataclass(frozen=True)
class PEq:
    diff: Poly  # diff = 0

    def __str__(self) -> str:
        return _rel_str(self.diff, "=")


@dataclass(frozen=True)
class PNeq:
    diff: Poly  # diff != 0

    def __str__(self) -> str:
        return _rel_str(self.diff, "!=")


@dataclass(frozen=True)
class SEq:
    left: tuple
    right: tuple

    def __str__(self) -> str:
        return f"{items_str(self.left)} = {items_str(self.right)}"


def _split(diff: Poly) -> tuple[Poly, Poly]:
    pos = Poly({m: c for m, c in diff.terms if c > 0})
    neg = Poly({m: -c for m, c in diff.terms if c < 0})
    return pos, neg


def _rel_str(diff: Poly, op: str) -> str:
    l, r = _split(diff.canonical())
    return f"{l} {op} {r}"


@dataclass(frozen=True)
class View:
    atoms: tuple = ()
    junk: bool = False

    def __str__(self) -> str:
        parts = [str(a) for a in self.atoms] + (["true"] if self.junk else [])
        return " * ".join(parts) if parts else "emp"


@dataclass(frozen=True)
class SymbolicHeap:
    existentials: frozenset = frozenset()
    pure: tuple = ()
    views: tuple = (View(),)

    def __str__(self) -> str:
        body = " && ".join(
            [f"({v})" if len(self.views) > 1 else str(v) for v in self.views]
            + [str(p) for p in self.pure]
        )
        if self.existentials:
            return f"exists {', '.join(sorted(self.existentials))}. {body}"
        return body

    def vars(self) -> set[str]:
        """Every variable name occurring, bound or free."""
        out = set(self.existentials)
        for p in self.pure:
            out |= _atom_vars(p)
        for v in self.views:
            for a in v.atoms:
                out |= _atom_vars(a)
        return out

    def free_vars(self) -> set[str]:
        return self.vars() - set(self.existentials)


def _atom_vars(a) -> set[str]:
    if isinstance(a, PT):
        return a.addr.vars() | a.value.vars()
    if isinstance(a, LS):
        return items_vars(a.seq) | a.start.vars() | a.end.vars()
    if isinstance(a, (PEq, PNeq)):
        return a.diff.vars()
    if isinstance(a, SEq):
        return items_vars(a.left) | items_vars(a.right)
    raise TypeError(a)


def subst_atom(a, ints: dict, seqs: dict | None = None):
    seqs = seqs or {}
    if isinstance(a, PT):
        return PT(a.addr.subst(ints), a.value.subst(ints))
    if isinstance(a, LS):
        return LS(subst_items(a.seq, ints, seqs), a.start.subst(ints), a.end.subst(ints))
    if isinstance(a, PEq):
        return PEq(a.diff.subst(ints))
    if isinstance(a, PNeq):
        return PNeq(a.diff.subst(ints))
    if isinstance(a, SEq):
        return SEq(subst_items(a.left, ints, seqs), subst_items(a.right, ints, seqs))
    raise TypeError(a)


def subst_items(items: tuple, ints: dict, seqs: dict) -> tuple:
    out: list = []
    for it in items:
        if isinstance(it, Elem):
            out.append(Elem(it.value.subst(ints)))
        elif it.name in seqs:
            val = seqs[it.name]
            out.extend(reverse_items(val) if it.rev else val)
        else:
            out.append(it)
    return tuple(out)


def rename_heap(h: SymbolicHeap, mapping: dict[str, str]) -> SymbolicHeap:
    """Rename variables (free or bound) of ``h``."""
    if not mapping:
        return h
    ints = {k: Poly.var(v) for k, v in mapping.items() if not is_seq_name(k)}
    seqs = {k: (SVar(v),) for k, v in mapping.items() if is_seq_name(k)}
    return SymbolicHeap(
        frozenset(mapping.get(x, x) for x in h.existentials),
        tuple(subst_atom(p, ints, seqs) for p in h.pure),
        tuple(View(tuple(subst_atom(a, ints, seqs) for a in v.atoms), v.junk) for v in h.views),
    )


def fresh(base: str, avoid: set[str]) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


# -- translation from assertions ----------------------------------------------------


def _pure_bexp(b, positive: bool) -> list:
    if isinstance(b, BoolConst):
        return [] if b.value == positive else [PEq(Poly.const(1))]
    if isinstance(b, Eq):
        d = poly(b.left) - poly(b.right)
        return [PEq(d) if positive else PNeq(d)]
    if isinstance(b, BNot):
        return _pure_bexp(b.inner, not positive)
    if isinstance(b, BAnd) and positive:
        return _pure_bexp(b.left, True) + _pure_bexp(b.right, True)
    if isinstance(b, BOr) and not positive:
        return _pure_bexp(b.left, False) + _pure_bexp(b.right, False)
    if isinstance(b, BImplies) and not positive:
        return _pure_bexp(b.left, True) + _pure_bexp(b.right, False)
    raise OutsideFragment("disjunctive pure condition")


def from_assertion(a, avoid: set[str] | frozenset = frozenset()) -> SymbolicHeap:
    """Translate an assertion into a symbolic heap.

    Bound variables are renamed away from ``avoid`` and from each other.
    Raises ``OutsideFragment`` for magic wands, universal quantifiers,
    spatial disjunction and negated spatial formulas.
    """
    top_free = assertion_vars(a)
    used = set(avoid) | top_free | bound_vars(a)
    exists: set[str] = set()

    def go(a, ren: dict) -> tuple[list, list]:
        # returns (pure atoms, views) with views a list of (atoms, junk)
        if isinstance(a, Emp):
            return [], [([], False)]
        if isinstance(a, Pure):
            return _pure_bexp(_rename_b(a.cond, ren), True), [([], True)]
        if isinstance(a, PointsTo):
            return [], [([PT(_p(a.addr, ren), _p(a.value, ren))], False)]
        if isinstance(a, ListRep):
            return [], [([LS(_items(a.seq, ren), _p(a.start, ren), _p(a.end, ren))], False)]
        if isinstance(a, SeqEq):
            return [SEq(_items(a.left, ren), _items(a.right, ren))], [([], True)]
        if isinstance(a, Not):
            inner = a.inner
            if isinstance(inner, Not):
                return go(inner.inner, ren)
            if isinstance(inner, Pure):
                return _pure_bexp(_rename_b(inner.cond, ren), False), [([], True)]
            raise OutsideFragment("negation of a non-pure assertion")
        if isinstance(a, Exists):
            clash = a.var in exists or a.var in avoid or a.var in top_free
            new = fresh(a.var, used) if clash else a.var
            used.add(new)
            exists.add(new)
            return go(a.body, {**ren, a.var: new})
        if isinstance(a, And):
            p1, v1 = go(a.left, ren)
            p2, v2 = go(a.right, ren)
            views = [v for v in v1 + v2 if v != ([], True)] or [([], True)]
            return p1 + p2, views
        if isinstance(a, SepConj):
            p1, v1 = go(a.left, ren)
            p2, v2 = go(a.right, ren)
            if len(v1) > 1 and len(v2) > 1:
                raise OutsideFragment("* between conjunctions of spatial formulas")
            if len(v1) > 1 or len(v2) > 1:
                many, one = (v1, v2[0]) if len(v1) > 1 else (v2, v1[0])
                if one[0]:
                    raise OutsideFragment("* between conjunctions of spatial formulas")
                # P * Q with Q pure-only (or emp): each view gets Q's junk.
                return p1 + p2, [(atoms, junk or one[1]) for atoms, junk in many]
            (a1, j1), (a2, j2) = v1[0], v2[0]
            return p1 + p2, [(a1 + a2, j1 or j2)]
        raise OutsideFragment(f"{type(a).__name__} is outside the symbolic fragment")

    pure, views = go(a, {})
    return SymbolicHeap(
        frozenset(exists), tuple(pure), tuple(View(tuple(at), j) for at, j in views)
    )


def _p(e, ren: dict) -> Poly:
    return poly(e).subst({k: Poly.var(v) for k, v in ren.items() if not is_seq_name(k)})


def _items(s, ren: dict) -> tuple:
    ints = {k: Poly.var(v) for k, v in ren.items() if not is_seq_name(k)}
    seqs = {k: (SVar(v),) for k, v in ren.items() if is_seq_name(k)}
    return subst_items(items_of(s), ints, seqs)


def _rename_b(b, ren: dict):
    if not ren:
        return b
    from ..verifier.subst import subst

    return subst(b, [(k, Var(v)) for k, v in ren.items() if not is_seq_name(k)])


def to_assertion(h: SymbolicHeap):
    """An assertion denoting ``h`` (used for printing and model checking)."""
    from ..syntax.ast import ListRep as AListRep

    def atom(a):
        if isinstance(a, PT):
            return PointsTo(a.addr.to_aexp(), a.value.to_aexp())
        if isinstance(a, LS):
            return AListRep(items_to_seq(a.seq), a.start.to_aexp(), a.end.to_aexp())
        if isinstance(a, PEq):
            l, r = _split(a.diff.canonical())
            return Pure(Eq(l.to_aexp(), r.to_aexp()))
        if isinstance(a, PNeq):
            l, r = _split(a.diff.canonical())
            return Not(Pure(Eq(l.to_aexp(), r.to_aexp())))
        if isinstance(a, SEq):
            return SeqEq(items_to_seq(a.left), items_to_seq(a.right))
        raise TypeError(a)

    views = []
    for v in h.views:
        parts = [atom(a) for a in v.atoms] + ([TRUE] if v.junk else [])
        views.append(sep_all(parts))
    body = and_all(views + [atom(p) for p in h.pure])
    for x in sorted(h.existentials, reverse=True):
        body = Exists(x, body)
    return body


# -- pure facts ----------------------------------------------------------------


class Facts:
    """Equalities kept as a substitution, plus disequalities and residues.

    ``rank(v)`` orders variables for elimination; lower ranks go first.
    """

    def __init__(self, rank: Callable[[str], int] = lambda v: 0):
        self.rank = rank
        self.isub: dict[str, Poly] = {}
        self.ssub: dict[str, tuple] = {}
        self.neqs: set[Poly] = set()
        self.eqs: list[Poly] = []
        self.seqs: list[tuple] = []
        self.ok = True

    def copy(self) -> "Facts":
        f = Facts(self.rank)
        f.isub = dict(self.isub)
        f.ssub = dict(self.ssub)
        f.neqs = set(self.neqs)
        f.eqs = list(self.eqs)
        f.seqs = list(self.seqs)
        f.ok = self.ok
        return f

    def signature(self) -> tuple:
        return (
            len(self.isub),
            len(self.ssub),
            len(self.neqs),
            len(self.eqs),
            len(self.seqs),
            self.ok,
        )

    # normal forms

    def norm(self, p: Poly) -> Poly:
        return p.subst(self.isub)

    def norm_items(self, items: tuple) -> tuple:
        return subst_items(subst_items(items, {}, self.ssub), self.isub, {})

    # adding facts

    def add(self, atom) -> None:
        if isinstance(atom, PEq):
            self.add_eq(atom.diff)
        elif isinstance(atom, PNeq):
            self.add_neq(atom.diff)
        elif isinstance(atom, SEq):
            self.add_seq(atom.left, atom.right)
        else:
            raise TypeError(atom)

    def add_eq(self, d: Poly) -> None:
        d = self.norm(d)
        if d.is_zero():
            return
        if d.is_const():
            self.ok = False
            return
        choices = [v for v in d.vars() if d.linear_coeff(v) in (1, -1)]
        if not choices:
            if d.canonical() not in {self.norm(e).canonical() for e in self.eqs}:
                self.eqs.append(d)
            return
        v = min(choices, key=lambda x: (self.rank(x), x))
        c = d.linear_coeff(v)
        val = (d - Poly.var(v).scale(c)).scale(-c)
        self._bind_int(v, val)

    def _bind_int(self, v: str, val: Poly) -> None:
        m = {v: val}
        self.isub = {k: t.subst(m) for k, t in self.isub.items()}
        self.isub[v] = val
        self.ssub = {k: subst_items(t, m, {}) for k, t in self.ssub.items()}
        neqs, self.neqs = self.neqs, set()
        for n in neqs:
            self.add_neq(n)
        eqs, self.eqs = self.eqs, []
        for e in eqs:
            self.add_eq(e)
        seqs, self.seqs = self.seqs, []
        for l, r in seqs:
            self.add_seq(l, r)

    def add_neq(self, d: Poly) -> None:
        d = self.norm(d)
        if d.is_zero():
            self.ok = False
        elif not d.is_const():
            self.neqs.add(d.canonical())

    def add_seq(self, l: tuple, r: tuple) -> None:
        l, r = _strip(self.norm_items(l), self.norm_items(r), self)
        if l is None:
            self.ok = False
            return
        if not l and not r:
            return
        for x, y in ((l, r), (r, l)):
            if not x and all(isinstance(i, SVar) for i in y):
                for i in y:
                    self._bind_seq(i.name, ())
                return
            if not x:
                self.ok = False
                return
        cands = []
        for x, y in ((l, r), (r, l)):
            if len(x) == 1 and isinstance(x[0], SVar) and x[0].name not in items_vars(y):
                cands.append((x[0], y))
        if cands:
            var, val = min(cands, key=lambda c: (self.rank(c[0].name), c[0].name))
            self._bind_seq(var.name, reverse_items(val) if var.rev else val)
            return
        key = (l, r)
        if key not in self.seqs and (r, l) not in self.seqs:
            self.seqs.append(key)

    def _bind_seq(self, v: str, val: tuple) -> None:
        m = {v: val}
        self.ssub = {k: subst_items(t, {}, m) for k, t in self.ssub.items()}
        self.ssub[v] = val
        seqs, self.seqs = self.seqs, []
        for l, r in seqs:
            self.add_seq(l, r)

    # queries

    def proves_eq(self, d: Poly) -> bool:
        d = self.norm(d)
        return d.is_zero() or d.canonical() in {self.norm(e).canonical() for e in self.eqs}

    def proves_neq(self, d: Poly) -> bool:
        d = self.norm(d)
        if d.is_const():
            return not d.is_zero()
        return d.canonical() in {self.norm(n).canonical() for n in self.neqs}

    def proves_seq(self, l: tuple, r: tuple) -> bool:
        l, r = _strip(self.norm_items(l), self.norm_items(r), None)
        if l is None:
            return False
        if not l and not r:
            return True
        for a, b in self.seqs:
            a, b = _strip(self.norm_items(a), self.norm_items(b), None)
            if (a, b) in ((l, r), (r, l)):
                return True
            if (reverse_items(a), reverse_items(b)) in ((l, r), (r, l)):
                return True
        return False

    def nonempty(self, items: tuple) -> bool:
        return any(isinstance(i, Elem) for i in self.norm_items(items))

    def atoms(self) -> list:
        out: list = []
        for v, t in sorted(self.isub.items()):
            out.append(PEq(Poly.var(v) - t))
        for v, t in sorted(self.ssub.items()):
            out.append(SEq((SVar(v),), t))
        out.extend(PEq(self.norm(e)) for e in self.eqs)
        out.extend(PNeq(self.norm(n)) for n in sorted(self.neqs))
        out.extend(SEq(self.norm_items(l), self.norm_items(r)) for l, r in self.seqs)
        return out


def _strip(l: tuple, r: tuple, facts: Optional[Facts]):
    """Remove a common prefix and suffix.

    With ``facts``, mismatched leading or trailing elements are decomposed
    into integer equalities recorded there; without, only identical items
    are removed.  Returns ``(None, None)`` on a definite clash.
    """
    l, r = list(l), list(r)
    for end in (0, -1):
        while l and r:
            a, b = l[end], r[end]
            if a == b:
                pass
            elif facts is not None and isinstance(a, Elem) and isinstance(b, Elem):
                facts.add_eq(a.value - b.value)
                if not facts.ok:
                    return None, None
            else:
                break
            l.pop(end)
            r.pop(end)
    return tuple(l), tuple(r)


# -- normalization ----------------------------------------------------------------


@dataclass
class Normalized:
    """A symbolic heap with its pure part compiled into ``Facts``."""

    facts: Facts
    views: list  # list of View
    existentials: set = field(default_factory=set)

    def copy(self) -> "Normalized":
        return Normalized(self.facts.copy(), list(self.views), set(self.existentials))

    def to_heap(self) -> SymbolicHeap:
        views = tuple(
            View(tuple(_norm_atom(a, self.facts) for a in v.atoms), v.junk) for v in self.views
        )
        pure = tuple(self.facts.atoms())
        used = set()
        for p in pure:
            used |= _atom_vars(p)
        for v in views:
            for a in v.atoms:
                used |= _atom_vars(a)
        return SymbolicHeap(frozenset(self.existentials & used), pure, views)

    def __str__(self) -> str:
        return str(self.to_heap())


def default_rank(existentials, program_vars) -> Callable[[str], int]:
    ex, prog = set(existentials), set(program_vars)

    def rank(v: str) -> int:
        if v in ex:
            return 0
        if v in prog:
            return 2
        return 1

    return rank


def _norm_atom(a, facts: Facts):
    if isinstance(a, PT):
        return PT(facts.norm(a.addr), facts.norm(a.value))
    if isinstance(a, LS):
        return LS(facts.norm_items(a.seq), facts.norm(a.start), facts.norm(a.end))
    raise TypeError(a)


def _footprint(a, facts: Facts) -> list[Poly]:
    if isinstance(a, PT):
        return [a.addr]
    if facts.nonempty(a.seq) or facts.proves_neq(a.start - a.end):
        return [a.start, a.start + Poly.const(1)]
    return []


def normalize_state(state: Normalized) -> Optional[Normalized]:
    """Saturate ``state`` in place; None when it is inconsistent."""
    facts = state.facts
    while True:
        before = (facts.signature(), tuple(len(v.atoms) for v in state.views))
        views = []
        for v in state.views:
            atoms = []
            for a in v.atoms:
                a = _norm_atom(a, facts)
                if isinstance(a, LS):
                    if not a.seq:
                        facts.add_eq(a.start - a.end)
                        continue
                    if facts.proves_eq(a.start - a.end):
                        facts.add_seq(a.seq, ())
                        continue
                    if facts.nonempty(a.seq):
                        facts.add_neq(a.start - a.end)
                atoms.append(a)
            foot = [(k, _footprint(a, facts)) for k, a in enumerate(atoms)]
            for k, addrs in foot:
                for x in addrs:
                    facts.add_neq(x)
            for i in range(len(foot)):
                for j in range(i + 1, len(foot)):
                    for x in foot[i][1]:
                        for y in foot[j][1]:
                            facts.add_neq(x - y)
            views.append(View(tuple(atoms), v.junk))
            if not facts.ok:
                return None
        # a view that only says "some heap" adds nothing next to others
        informative = [v for v in views if v.atoms or not v.junk]
        state.views = informative or [View((), True)]
        if not facts.ok:
            return None
        if (facts.signature(), tuple(len(v.atoms) for v in state.views)) == before:
            state.views = [View(tuple(_norm_atom(a, facts) for a in v.atoms), v.junk) for v in state.views]
            return state


def prepare(h: SymbolicHeap, program_vars=()) -> Optional[Normalized]:
    facts = Facts(default_rank(h.existentials, program_vars))
    for p in h.pure:
        facts.add(p)
    state = Normalized(facts, list(h.views), set(h.existentials))
    if not facts.ok:
        return None
    return normalize_state(state)


def normalize(h: SymbolicHeap, program_vars=()) -> Optional[SymbolicHeap]:
    """Substitute equalities, derive disequalities and drop empty segments.

    Returns None when ``h`` is inconsistent.
    """
    state = prepare(h, program_vars)
    return None if state is None else state.to_heap()
