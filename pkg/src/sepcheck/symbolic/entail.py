"""Proof search for symbolic-heap entailment and frame inference.

The prover matches the consequent's spatial atoms against the antecedent's
one at a time, binding the consequent's existentials by unification.  The
rules are points-to matching, direct listrep matching, listrep-empty,
fold-right on the consequent (``i |-> a, j * listrep(s, j, k)`` with
``i != k`` gives ``listrep(a.s, i, k)``) and unfold-left on the antecedent
when a cell inside a provably nonempty segment is needed.  Pure atoms are
discharged last against the antecedent's facts.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterator, Optional

from ..syntax.ast import is_seq_name
from .heap import (
    LS,
    PEq,
    PNeq,
    PT,
    SEq,
    Normalized,
    SymbolicHeap,
    View,
    fresh,
    prepare,
    rename_heap,
    subst_items,
)
from .terms import Elem, Poly, SVar, items_str, items_vars

DEFAULT_DEPTH = 64


class SearchLimit(Exception):
    """The proof search exceeded its depth bound."""


def default_depth() -> int:
    try:
        return int(os.environ.get("SEPCHECK_DEPTH", DEFAULT_DEPTH))
    except ValueError:
        return DEFAULT_DEPTH


@dataclass
class ProofTrace:
    """A rule application with the steps that justify it."""

    rule: str
    conclusion: str
    premises: list = field(default_factory=list)

    def render(self, indent: int = 0) -> str:
        lines = ["  " * indent + f"[{self.rule}] {self.conclusion}"]
        for p in self.premises:
            lines.append(p.render(indent + 1))
        return "\n".join(lines)

    def rules(self) -> list[str]:
        out = [self.rule]
        for p in self.premises:
            out.extend(p.rules())
        return out

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "conclusion": self.conclusion,
            "premises": [p.to_dict() for p in self.premises],
        }


class Binding:
    """Solved existentials of the consequent, kept fully resolved."""

    __slots__ = ("ints", "seqs")

    def __init__(self, ints=None, seqs=None):
        self.ints = ints or {}
        self.seqs = seqs or {}

    def __contains__(self, v: str) -> bool:
        return v in self.ints or v in self.seqs

    def ap(self, p: Poly) -> Poly:
        return p.subst(self.ints)

    def ai(self, items: tuple) -> tuple:
        return subst_items(subst_items(items, {}, self.seqs), self.ints, {})

    def with_int(self, v: str, val: Poly) -> "Binding":
        val = self.ap(val)
        m = {v: val}
        ints = {k: t.subst(m) for k, t in self.ints.items()}
        ints[v] = val
        seqs = {k: subst_items(t, m, {}) for k, t in self.seqs.items()}
        return Binding(ints, seqs)

    def with_seq(self, v: str, val: tuple) -> "Binding":
        val = self.ai(val)
        m = {v: val}
        seqs = {k: subst_items(t, {}, m) for k, t in self.seqs.items()}
        seqs[v] = val
        return Binding(dict(self.ints), seqs)

    def __str__(self) -> str:
        parts = [f"{k} := {v}" for k, v in sorted(self.ints.items())]
        parts += [f"{k} := {items_str(v)}" for k, v in sorted(self.seqs.items())]
        return ", ".join(parts)


def _resolve(a, b: Binding, facts):
    if isinstance(a, PT):
        return PT(facts.norm(b.ap(a.addr)), facts.norm(b.ap(a.value)))
    if isinstance(a, LS):
        return LS(facts.norm_items(b.ai(a.seq)), facts.norm(b.ap(a.start)), facts.norm(b.ap(a.end)))
    return a


def _leaf(rule: str, text: str) -> ProofTrace:
    return ProofTrace(rule, text)


class _Search:
    def __init__(self, unif: set[str], limit: int, used: set[str]):
        self.unif = set(unif)
        self.limit = limit
        self.used = set(used)

    def fresh(self, base: str) -> str:
        name = fresh(base, self.used)
        self.used.add(name)
        return name

    def open_vars(self, names, b: Binding) -> set[str]:
        return {v for v in names if v in self.unif and v not in b}

    # -- unification --------------------------------------------------------

    def solve_zero(self, d: Poly, b: Binding, facts) -> Optional[Binding]:
        d = facts.norm(b.ap(d))
        opened = sorted(self.open_vars(d.vars(), b))
        if not opened:
            return b if facts.proves_eq(d) else None
        for v in opened:
            c = d.linear_coeff(v)
            if c in (1, -1):
                val = (d - Poly.var(v).scale(c)).scale(-c)
                return b.with_int(v, val)
        return None

    def unify_seq(self, l: tuple, r: tuple, b: Binding, facts) -> Optional[Binding]:
        l = list(facts.norm_items(b.ai(l)))
        r = list(facts.norm_items(b.ai(r)))
        for end in (0, -1):
            while l and r:
                x, y = l[end], r[end]
                if x == y:
                    pass
                elif isinstance(x, Elem) and isinstance(y, Elem):
                    b2 = self.solve_zero(x.value - y.value, b, facts)
                    if b2 is None:
                        return None
                    b = b2
                else:
                    break
                l.pop(end)
                r.pop(end)
                l = list(facts.norm_items(b.ai(tuple(l))))
                r = list(facts.norm_items(b.ai(tuple(r))))
        l, r = tuple(l), tuple(r)
        if not l and not r:
            return b
        for x, y in ((l, r), (r, l)):
            if len(x) == 1 and isinstance(x[0], SVar) and self.open_vars([x[0].name], b):
                if x[0].name in items_vars(y):
                    return None
                val = tuple(i.flip() if isinstance(i, SVar) else i for i in reversed(y)) if x[0].rev else y
                return b.with_seq(x[0].name, val)
            if not x and y and all(isinstance(i, SVar) and self.open_vars([i.name], b) for i in y):
                for i in y:
                    b = b.with_seq(i.name, ())
                return b
        if self.open_vars(items_vars(l) | items_vars(r), b):
            return None
        return b if facts.proves_seq(l, r) else None

    # -- spatial matching ------------------------------------------------------

    def pick(self, qatoms: tuple, b: Binding, facts) -> int:
        best = None
        for k, a in enumerate(qatoms):
            head = a.addr if isinstance(a, PT) else a.start
            if not self.open_vars(b.ap(head).vars(), b):
                rank = 0 if isinstance(a, PT) else 1
                if best is None or rank < best[0]:
                    best = (rank, k)
        return best[1] if best else 0

    def unfold(self, P: Normalized, seg: LS):
        P2 = P.copy()
        x, j, s = self.fresh("v"), self.fresh("n"), self.fresh("@s")
        P2.existentials |= {x, j, s}
        f = P2.facts
        f.add_seq(seg.seq, (Elem(Poly.var(x)), SVar(s)))
        f.add_neq(seg.start - seg.end)
        if not f.ok:
            return None, ()
        one = Poly.const(1)
        cells = (
            PT(seg.start, Poly.var(x)),
            PT(seg.start + one, Poly.var(j)),
            LS((SVar(s),), Poly.var(j), seg.end),
        )
        return P2, cells

    def match(self, P, patoms, pjunk, qatoms, qjunk, b, deferred, depth, steps) -> Iterator:
        if depth > self.limit:
            raise SearchLimit(f"proof search exceeded depth {self.limit}")
        f = P.facts
        if not qatoms:
            if (patoms or pjunk) and not qjunk:
                return
            yield P, b, deferred, patoms, steps
            return
        k = self.pick(qatoms, b, f)
        q = _resolve(qatoms[k], b, f)
        rest = qatoms[:k] + qatoms[k + 1 :]
        patoms = tuple(_resolve(a, Binding(), f) for a in patoms)
        if isinstance(q, PT):
            for i, p in enumerate(patoms):
                if not isinstance(p, PT):
                    continue
                b1 = self.solve_zero(q.addr - p.addr, b, f)
                if b1 is None:
                    continue
                b2 = self.solve_zero(q.value - p.value, b1, f)
                if b2 is None:
                    continue
                step = _leaf("points-to", f"{p} matches {_resolve(q, b2, f)}")
                yield from self.match(
                    P, patoms[:i] + patoms[i + 1 :], pjunk, rest, qjunk, b2, deferred, depth + 1, steps + (step,)
                )
            if self.open_vars(q.addr.vars(), b):
                return
            one = Poly.const(1)
            for i, p in enumerate(patoms):
                if not isinstance(p, LS):
                    continue
                inside = f.proves_eq(q.addr - p.start) or f.proves_eq(q.addr - p.start - one)
                if not inside or not (f.nonempty(p.seq) or f.proves_neq(p.start - p.end)):
                    continue
                P2, cells = self.unfold(P, p)
                if P2 is None:
                    continue
                step = _leaf("unfold-left", f"{p} unfolds to {' * '.join(map(str, cells))}")
                yield from self.match(
                    P2, patoms[:i] + cells + patoms[i + 1 :], pjunk, qatoms, qjunk, b, deferred, depth + 1, steps + (step,)
                )
            return
        # listrep on the right
        ends_bound = not self.open_vars(q.start.vars() | q.end.vars(), b)
        if ends_bound and f.proves_eq(q.start - q.end):
            b1 = self.unify_seq(q.seq, (), b, f)
            if b1 is not None:
                step = _leaf("listrep-empty", f"{q} holds of the empty heap since {q.start} = {q.end}")
                yield from self.match(P, patoms, pjunk, rest, qjunk, b1, deferred, depth + 1, steps + (step,))
            return
        for i, p in enumerate(patoms):
            if not isinstance(p, LS):
                continue
            b1 = self.solve_zero(q.start - p.start, b, f)
            b1 = b1 and self.solve_zero(q.end - p.end, b1, f)
            b1 = b1 and self.unify_seq(q.seq, p.seq, b1, f)
            if b1 is None:
                continue
            step = _leaf("listrep", f"{p} matches {_resolve(q, b1, f)}")
            yield from self.match(
                P, patoms[:i] + patoms[i + 1 :], pjunk, rest, qjunk, b1, deferred, depth + 1, steps + (step,)
            )
        if ends_bound and f.proves_neq(q.start - q.end):
            x, j, s = self.fresh("a"), self.fresh("j"), self.fresh("@t")
            self.unif |= {x, j, s}
            headed = (Elem(Poly.var(x)), SVar(s))
            cells = (
                PT(q.start, Poly.var(x)),
                PT(q.start + Poly.const(1), Poly.var(j)),
                LS((SVar(s),), Poly.var(j), q.end),
            )
            b1 = self.unify_seq(q.seq, headed, b, f)
            d1 = deferred
            if b1 is None:
                b1, d1 = b, deferred + (SEq(q.seq, headed),)
            step = _leaf("fold-right", f"{q} from {' * '.join(map(str, cells))} and {q.start} != {q.end}")
            yield from self.match(P, patoms, pjunk, cells + rest, qjunk, b1, d1, depth + 1, steps + (step,))

    # -- pure part ----------------------------------------------------------

    def discharge(self, atoms, facts, b: Binding) -> Optional[Binding]:
        pending = list(atoms)
        while pending:
            waiting = []
            for a in pending:
                if isinstance(a, PEq):
                    b2 = self.solve_zero(a.diff, b, facts)
                    if b2 is None:
                        return None
                    b = b2
                elif isinstance(a, PNeq):
                    d = facts.norm(b.ap(a.diff))
                    if self.open_vars(d.vars(), b):
                        waiting.append(a)
                    elif not facts.proves_neq(d):
                        return None
                elif isinstance(a, SEq):
                    b2 = self.unify_seq(a.left, a.right, b, facts)
                    if b2 is not None:
                        b = b2
                    elif self.open_vars(items_vars(b.ai(a.left)) | items_vars(b.ai(a.right)), b):
                        waiting.append(a)
                    else:
                        return None
            if len(waiting) == len(pending):
                return None
            pending = waiting
        return b

    def prove(self, P: Normalized, Q: SymbolicHeap) -> Iterator:
        qviews = [v for v in Q.views if v.atoms or not v.junk]

        def go(k, P, b, deferred, steps):
            if k == len(qviews):
                b2 = self.discharge(tuple(Q.pure) + deferred, P.facts, b)
                if b2 is not None:
                    text = "pure part follows" + (f" with {b2}" if str(b2) else "")
                    yield P, b2, steps + (_leaf("pure", text),)
                return
            qv = qviews[k]
            for pv in P.views:
                if pv.junk and not qv.junk:
                    continue
                for P2, b2, d2, _left, st in self.match(
                    P, pv.atoms, pv.junk, qv.atoms, qv.junk, b, deferred, 0, steps
                ):
                    yield from go(k + 1, P2, b2, d2, st)

        yield from go(0, P, Binding(), (), ())


def _apart(P: SymbolicHeap, Q: SymbolicHeap) -> tuple[SymbolicHeap, SymbolicHeap]:
    """Rename bound variables of both sides apart from everything else."""
    taken = P.free_vars() | Q.free_vars()
    ren = {}
    for x in sorted(P.existentials):
        if x in taken:
            ren[x] = fresh(x, taken | P.vars() | Q.vars() | set(ren.values()))
        taken.add(ren.get(x, x))
    P = rename_heap(P, ren)
    ren = {}
    for x in sorted(Q.existentials):
        if x in taken:
            ren[x] = fresh(x, taken | P.vars() | Q.vars() | set(ren.values()))
        taken.add(ren.get(x, x))
    return P, rename_heap(Q, ren)


def entails(
    P: SymbolicHeap, Q: SymbolicHeap, depth: Optional[int] = None, program_vars=()
) -> Optional[ProofTrace]:
    """A proof of ``P |- Q``, or None when the search finds none.

    Raises ``SearchLimit`` when the depth bound is exceeded.
    """
    P, Q = _apart(P, Q)
    conclusion = f"{P} |- {Q}"
    Pn = prepare(P, program_vars)
    if Pn is None:
        return ProofTrace("inconsistent", conclusion, [_leaf("normalize", "antecedent has no models")])
    search = _Search(set(Q.existentials), depth or default_depth(), P.vars() | Q.vars())
    for _P, _b, steps in search.prove(Pn, Q):
        return ProofTrace("entails", conclusion, list(steps))
    return None


def find_cell(P: Normalized, view: int, addr: Poly, depth: Optional[int] = None, used=()):
    """Locate the cell at ``addr`` in one view of ``P``.

    Returns ``(P', frame_atoms, cell, steps)`` where ``P'`` may carry new
    skolem variables from unfolding and ``frame_atoms`` are the view's other
    atoms, or None when no match is provable.
    """
    v = fresh("v", set(used))
    search = _Search({v}, depth or default_depth(), set(used) | {v})
    pv = P.views[view]
    for P2, b, _d, left, steps in search.match(
        P, pv.atoms, pv.junk, (PT(addr, Poly.var(v)),), True, Binding(), (), 0, ()
    ):
        cell = PT(P2.facts.norm(addr), P2.facts.norm(b.ap(Poly.var(v))))
        return P2, tuple(left), cell, list(steps)
    return None


def frame(
    P: SymbolicHeap, footprint: SymbolicHeap, depth: Optional[int] = None, program_vars=()
) -> Optional[tuple[SymbolicHeap, ProofTrace]]:
    """Frame ``R`` with ``P |- footprint * R``, or None.

    ``R`` keeps the antecedent's pure part and the spatial atoms left over
    after the footprint's atoms are matched.
    """
    P, footprint = _apart(P, footprint)
    Pn = prepare(P, program_vars)
    if Pn is None:
        return None
    search = _Search(set(footprint.existentials), depth or default_depth(), P.vars() | footprint.vars())
    qatoms = tuple(a for v in footprint.views for a in v.atoms)
    for pv in Pn.views:
        for P2, b, d, left, steps in search.match(
            Pn, pv.atoms, pv.junk, qatoms, True, Binding(), (), 0, ()
        ):
            if search.discharge(tuple(footprint.pure) + d, P2.facts, b) is None:
                continue
            R = Normalized(P2.facts, [View(tuple(left), pv.junk)], set(P2.existentials))
            heap = R.to_heap()
            trace = ProofTrace("frame", f"{P} |- {footprint} * {heap}", list(steps))
            return heap, trace
    return None
