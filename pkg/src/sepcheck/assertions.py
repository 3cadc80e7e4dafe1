"""Deciding assertions on concrete states.

``sat`` is the finitized satisfaction relation.  Integer quantifiers range
over a finite value domain, sequence quantifiers over sequences that can be
read off the heap or carved out of sequences already bound in the store, and
``p -* q`` is decided only when ``p`` has finitely many enumerable models.

``models_of`` enumerates the heaps satisfying a precise assertion; it backs
the magic wand and the fuzzer's state sampler.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional

from .semantics import EvalError, State, eval_aexp, eval_bexp
from .syntax.ast import (
    And,
    BinOp,
    Emp,
    Eps,
    Eq,
    Exists,
    Forall,
    Implies,
    ListRep,
    Not,
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
    TRUE,
    Var,
    is_seq_name,
    sep_all,
)
from .syntax.vars import assertion_vars, free_vars, literals

DEFAULT_VALUES = tuple(range(8))


class Unsupported(Exception):
    """The assertion lies outside the fragment this procedure can decide."""


@dataclass(frozen=True)
class DomainConfig:
    """Finite domains for quantifiers and magic-wand extensions.

    ``None`` selects the state-dependent default: every integer of the state
    and the assertion plus ``0..7`` for values, and the heap's domain plus
    positive integers of the store and assertion plus ``fresh`` unused
    locations for addresses.
    """

    value_domain: Optional[frozenset] = None
    location_universe: Optional[frozenset] = None
    seq_len: int = 4
    fresh: int = 4


class _Ctx:
    __slots__ = ("values", "locs", "seq_len", "order")

    def __init__(self, values, locs, seq_len, order):
        self.values = values
        self.locs = locs
        self.seq_len = seq_len
        self.order = order


def _state_ints(store: dict, heap: dict) -> set[int]:
    out: set[int] = set()
    for v in store.values():
        if isinstance(v, tuple):
            out.update(v)
        else:
            out.add(v)
    out.update(heap)
    out.update(heap.values())
    return out


def resolve(cfg: Optional[DomainConfig], p, store: dict, heap: dict, order=None) -> _Ctx:
    cfg = cfg or DomainConfig()
    lits = literals(p)
    if cfg.value_domain is not None:
        values = sorted(cfg.value_domain)
    else:
        values = sorted(_state_ints(store, heap) | lits | set(DEFAULT_VALUES))
    if cfg.location_universe is not None:
        locs = sorted(l for l in cfg.location_universe if l >= 1)
    else:
        known = set(heap) | {v for v in _state_ints(store, {}) | lits if v >= 1}
        top = max(known, default=0)
        locs = sorted(known | set(range(top + 1, top + 1 + cfg.fresh)))
    return _Ctx(values, locs, cfg.seq_len, order or (lambda xs: xs))


# -- sequences ----------------------------------------------------------------


def eval_seq(env: dict, s) -> tuple:
    if isinstance(s, Eps):
        return ()
    if isinstance(s, SeqVar):
        try:
            v = env[s.name]
        except KeyError:
            raise EvalError(f"unbound sequence variable {s.name}") from None
        if not isinstance(v, tuple):
            raise EvalError(f"{s.name} does not hold a sequence")
        return v
    if isinstance(s, SeqCons):
        return (eval_aexp(env, s.head),) + eval_seq(env, s.tail)
    if isinstance(s, SeqConcat):
        return eval_seq(env, s.left) + eval_seq(env, s.right)
    if isinstance(s, SeqRev):
        return eval_seq(env, s.inner)[::-1]
    raise TypeError(f"not a sequence expression: {s!r}")


def listrep_footprint(items: tuple, start: int, end: int, heap: dict) -> Optional[frozenset]:
    """Cells of the segment from ``start`` to ``end`` holding ``items``, or None.

    A nonempty segment requires its head to differ from ``end``, and every
    node is the two-cell block ``cur |-> item, next``.
    """
    cur, used = start, set()
    for a in items:
        if cur == end or cur not in heap or cur + 1 not in heap:
            return None
        if cur in used or cur + 1 in used or heap[cur] != a:
            return None
        used.update((cur, cur + 1))
        cur = heap[cur + 1]
    return frozenset(used) if cur == end else None


def _walk(start: int, heap: dict, stop: Optional[int] = None) -> list[tuple]:
    """Contents of every segment starting at ``start``, shortest first."""
    out, cur, seen, items = [()], start, set(), []
    while cur != stop and cur in heap and cur + 1 in heap and cur not in seen:
        seen.add(cur)
        items.append(heap[cur])
        out.append(tuple(items))
        cur = heap[cur + 1]
    return out


# -- quantifier witnesses -------------------------------------------------------


def _solve_linear(e, var: str, target: int, env: dict) -> Optional[int]:
    try:
        e0 = eval_aexp({**env, var: 0}, e)
        e1 = eval_aexp({**env, var: 1}, e)
        e2 = eval_aexp({**env, var: 2}, e)
    except EvalError:
        return None
    c = e1 - e0
    if c == 0 or e2 - e1 != c or (target - e0) % c:
        return None
    return (target - e0) // c


def _atoms(a, var: str):
    """Atoms of ``a`` in which ``var`` occurs free."""
    if isinstance(a, (Exists, Forall)):
        if a.var != var:
            yield from _atoms(a.body, var)
    elif isinstance(a, Not):
        yield from _atoms(a.inner, var)
    elif isinstance(a, (SepConj, SepImp, And, Or, Implies)):
        yield from _atoms(a.left, var)
        yield from _atoms(a.right, var)
    elif var in assertion_vars(a):
        yield a


def _int_hints(var: str, body, env: dict, heap: dict) -> list[int]:
    out = []
    for atom in _atoms(body, var):
        if isinstance(atom, PointsTo):
            for l, w in heap.items():
                for e, t in ((atom.addr, l), (atom.value, w)):
                    v = _solve_linear(e, var, t, env)
                    if v is not None:
                        out.append(v)
        elif isinstance(atom, Pure) and isinstance(atom.cond, Eq):
            v = _solve_linear(BinOp("-", atom.cond.left, atom.cond.right), var, 0, env)
            if v is not None:
                out.append(v)
    return out


def _seq_hints(var: str, body, env: dict, heap: dict) -> list[tuple]:
    out = []
    for atom in _atoms(body, var):
        if not isinstance(atom, ListRep):
            continue
        try:
            start, end = eval_aexp(env, atom.start), eval_aexp(env, atom.end)
        except EvalError:
            continue
        full = _walk(start, heap, stop=end)[-1]
        s = atom.seq
        if isinstance(s, SeqVar) and s.name == var:
            out.append(full)
        elif isinstance(s, SeqCons) and isinstance(s.tail, SeqVar) and s.tail.name == var and full:
            out.append(full[1:])
        elif isinstance(s, SeqRev) and isinstance(s.inner, SeqVar) and s.inner.name == var:
            out.append(full[::-1])
    return out


def _seq_domain(env: dict, heap: dict) -> list[tuple]:
    out = [()]
    for l in sorted(heap):
        out.extend(_walk(l, heap))
    for v in env.values():
        if isinstance(v, tuple):
            for i in range(len(v) + 1):
                for j in range(i, len(v) + 1):
                    out.append(v[i:j])
                    out.append(v[i:j][::-1])
    return out


def _dedupe(xs: Iterable) -> list:
    seen, out = set(), []
    for x in xs:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def _candidates(var: str, body, env: dict, heap: dict, ctx: _Ctx) -> list:
    if is_seq_name(var):
        return _dedupe(_seq_hints(var, body, env, heap) + _seq_domain(env, heap))
    return _dedupe(_int_hints(var, body, env, heap) + list(ctx.values))


# -- satisfaction ----------------------------------------------------------------


def is_pure(a) -> bool:
    """Heap-independent assertions."""
    if isinstance(a, (Pure, SeqEq)):
        return True
    if isinstance(a, Not):
        return is_pure(a.inner)
    if isinstance(a, (And, Or, Implies)):
        return is_pure(a.left) and is_pure(a.right)
    if isinstance(a, (Exists, Forall)):
        return is_pure(a.body)
    return False


def is_precise(a) -> bool:
    """Assertions whose models for a fixed store can be enumerated."""
    if isinstance(a, (Emp, PointsTo, ListRep)):
        return True
    if isinstance(a, (SepConj, Or)):
        return is_precise(a.left) and is_precise(a.right)
    if isinstance(a, And):
        return is_precise(a.left) or is_precise(a.right)
    if isinstance(a, Exists):
        return is_precise(a.body)
    return False


def _flatten(a) -> list:
    if isinstance(a, SepConj):
        return _flatten(a.left) + _flatten(a.right)
    return [a]


def _fresh(var: str, avoid: set[str]) -> str:
    name = var + "'"
    while name in avoid:
        name += "'"
    return name


def _check_bound(p, store: dict) -> None:
    missing = sorted(assertion_vars(p) - store.keys())
    if missing:
        raise EvalError(f"unbound variable {missing[0]}")


def sat(p, st: State, cfg: Optional[DomainConfig] = None) -> bool:
    """Whether ``st`` satisfies ``p``.

    Raises ``Unsupported`` for a magic wand with an imprecise left operand and
    ``EvalError`` when a free variable of ``p`` is unbound.
    """
    _check_bound(p, st.store)
    ctx = resolve(cfg, p, st.store, st.heap)
    return _sat(p, dict(st.store), dict(st.heap), ctx)


def _sat(p, env: dict, h: dict, ctx: _Ctx) -> bool:
    if isinstance(p, Emp):
        return not h
    if isinstance(p, Pure):
        return eval_bexp(env, p.cond)
    if isinstance(p, PointsTo):
        if len(h) != 1:
            return False
        a = eval_aexp(env, p.addr)
        return a in h and h[a] == eval_aexp(env, p.value)
    if isinstance(p, ListRep):
        fp = listrep_footprint(
            eval_seq(env, p.seq), eval_aexp(env, p.start), eval_aexp(env, p.end), h
        )
        return fp is not None and len(fp) == len(h)
    if isinstance(p, SeqEq):
        return eval_seq(env, p.left) == eval_seq(env, p.right)
    if isinstance(p, Not):
        return not _sat(p.inner, env, h, ctx)
    if isinstance(p, And):
        return _sat(p.left, env, h, ctx) and _sat(p.right, env, h, ctx)
    if isinstance(p, Or):
        return _sat(p.left, env, h, ctx) or _sat(p.right, env, h, ctx)
    if isinstance(p, Implies):
        return (not _sat(p.left, env, h, ctx)) or _sat(p.right, env, h, ctx)
    if isinstance(p, Exists):
        return any(
            _sat(p.body, {**env, p.var: c}, h, ctx) for c in _candidates(p.var, p.body, env, h, ctx)
        )
    if isinstance(p, Forall):
        return all(
            _sat(p.body, {**env, p.var: c}, h, ctx) for c in _candidates(p.var, p.body, env, h, ctx)
        )
    if isinstance(p, SepConj):
        return _sat_sep(_flatten(p), env, h, ctx, junk=False)
    if isinstance(p, SepImp):
        if not is_precise(p.left):
            raise Unsupported("-* needs a precise left operand")
        for ext in _models(p.left, env, h, ctx):
            if not _sat(p.right, env, {**h, **ext}, ctx):
                return False
        return True
    raise TypeError(f"not an assertion: {p!r}")


def _sat_sep(parts: list, env: dict, h: dict, ctx: _Ctx, junk: bool) -> bool:
    """``parts[0] * parts[1] * ...`` on ``h``; ``junk`` allows leftover cells."""
    remaining = dict(h)
    rest = []
    # Parts whose footprint is fixed by the store consume cells directly.
    for part in parts:
        if isinstance(part, Emp):
            continue
        if is_pure(part):
            if not _sat(part, env, {}, ctx):
                return False
            junk = True
            continue
        if isinstance(part, PointsTo):
            a = eval_aexp(env, part.addr)
            if a not in remaining or remaining[a] != eval_aexp(env, part.value):
                return False
            del remaining[a]
            continue
        if (
            isinstance(part, Exists)
            and isinstance(part.body, PointsTo)
            and part.body.value == Var(part.var)
            and part.var not in free_vars(part.body.addr)
        ):
            a = eval_aexp(env, part.body.addr)
            if a not in remaining:
                return False
            del remaining[a]
            continue
        if isinstance(part, ListRep):
            fp = listrep_footprint(
                eval_seq(env, part.seq),
                eval_aexp(env, part.start),
                eval_aexp(env, part.end),
                remaining,
            )
            if fp is None:
                return False
            for l in fp:
                del remaining[l]
            continue
        rest.append(part)
    if not rest:
        return junk or not remaining
    others = rest[1:]
    first = rest[0]
    # (p1 || p2) * q <=> p1 * q || p2 * q
    if isinstance(first, Or):
        return _sat_sep([first.left] + others, env, remaining, ctx, junk) or _sat_sep(
            [first.right] + others, env, remaining, ctx, junk
        )
    # (exists x. p) * q <=> exists x. (p * q), renaming x away from q
    if isinstance(first, Exists):
        var, body = first.var, first.body
        clash = set().union(*(assertion_vars(o) for o in others)) if others else set()
        if var in clash or var in env:
            from .verifier.subst import subst

            new = _fresh(var, clash | set(env) | assertion_vars(body))
            body = subst(body, [(var, SeqVar(new) if is_seq_name(var) else Var(new))])
            var = new
        whole = sep_all([body] + others + ([TRUE] if junk else []))
        return any(
            _sat(whole, {**env, var: c}, remaining, ctx)
            for c in _candidates(var, whole, env, remaining, ctx)
        )
    keys = sorted(remaining)
    if not others and not junk:
        return _sat(first, env, remaining, ctx)
    for r in range(len(keys) + 1):
        for chosen in itertools.combinations(keys, r):
            h1 = {l: remaining[l] for l in chosen}
            if not _sat(first, env, h1, ctx):
                continue
            h2 = {l: v for l, v in remaining.items() if l not in h1}
            if _sat_sep(others, env, h2, ctx, junk):
                return True
    return False


# -- model enumeration ----------------------------------------------------------------


def models_of(
    p,
    store: dict,
    cfg: Optional[DomainConfig] = None,
    order: Optional[Callable[[list], Iterable]] = None,
) -> Iterator[dict]:
    """Yield every distinct heap ``h`` with ``[[p]] store h``.

    ``p`` must be built from emp, points-to, ``*``, ``||``, listrep, ``exists``
    and ``&&`` with at least one precise side.  Unconstrained addresses range
    over the configured location universe.  ``order`` reorders candidate
    lists before they are tried (for example to shuffle them when sampling).
    """
    if not is_precise(p):
        raise Unsupported("models_of needs a precise assertion")
    _check_bound(p, store)
    ctx = resolve(cfg, p, store, {}, order)
    seen = set()
    for h in _models(p, dict(store), {}, ctx):
        key = tuple(sorted(h.items()))
        if key not in seen:
            seen.add(key)
            yield h


def _all_seqs(values: list, n: int) -> list[tuple]:
    out = []
    for k in range(n + 1):
        out.extend(itertools.product(values, repeat=k))
    return out


def _models(p, env: dict, used: dict, ctx: _Ctx) -> Iterator[dict]:
    """Models of ``p`` whose cells avoid ``used``."""
    if isinstance(p, Emp):
        yield {}
    elif isinstance(p, PointsTo):
        a = eval_aexp(env, p.addr)
        if a >= 1 and a not in used:
            yield {a: eval_aexp(env, p.value)}
    elif isinstance(p, SepConj):
        for h1 in _models(p.left, env, used, ctx):
            inner = {**used, **h1}
            for h2 in _models(p.right, env, inner, ctx):
                yield {**h1, **h2}
    elif isinstance(p, Or):
        yield from _models(p.left, env, used, ctx)
        yield from _models(p.right, env, used, ctx)
    elif isinstance(p, And):
        if is_precise(p.left):
            gen, check = p.left, p.right
        else:
            gen, check = p.right, p.left
        for h in _models(gen, env, used, ctx):
            if _sat(check, env, h, ctx):
                yield h
    elif isinstance(p, Exists):
        if is_seq_name(p.var):
            cands = _all_seqs(ctx.values, ctx.seq_len)
        elif _addresses_mention(p.body, p.var):
            cands = sorted(set(ctx.locs) | {v for v in ctx.values if v < 1})
        else:
            cands = list(ctx.values)
        for c in ctx.order(cands):
            yield from _models(p.body, {**env, p.var: c}, used, ctx)
    elif isinstance(p, ListRep):
        items = eval_seq(env, p.seq)
        start, end = eval_aexp(env, p.start), eval_aexp(env, p.end)
        yield from _chains(items, start, end, used, ctx)
    else:
        raise Unsupported(f"no model enumeration for {type(p).__name__}")


def _addresses_mention(a, var: str) -> bool:
    for atom in _atoms(a, var):
        if isinstance(atom, PointsTo) and var in free_vars(atom.addr):
            return True
        if isinstance(atom, ListRep) and var in free_vars(atom.start):
            return True
    return False


def _chains(items: tuple, cur: int, end: int, used: dict, ctx: _Ctx) -> Iterator[dict]:
    if not items:
        if cur == end:
            yield {}
        return
    if cur == end or cur < 1 or cur in used or cur + 1 in used:
        return
    if len(items) == 1:
        nexts = [end]
    else:
        locs = set(ctx.locs)
        nexts = list(ctx.order([l for l in ctx.locs if l != end and l + 1 in locs]))
    cell = {cur: items[0], cur + 1: None}
    inner = {**used, **cell}
    for nxt in nexts:
        for rest in _chains(items[1:], nxt, end, inner, ctx):
            yield {cur: items[0], cur + 1: nxt, **rest}
