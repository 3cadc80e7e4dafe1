"""Operational oracle for the backward rules.

A state satisfies the backward precondition of ``c`` for ``q`` exactly when
``c`` cannot abort from it and every final state satisfies ``q``.  For
allocation that quantifies over every address the allocator might pick, so
the oracle runs the command once per free block in the quantifier domain.
"""

import itertools

from sepcheck.assertions import DomainConfig, sat
from sepcheck.semantics import Final, State, exec_command
from sepcheck.syntax import parse_assertion, parse_command
from sepcheck.syntax.ast import Alloc
from sepcheck.verifier import wp

LOCS = range(1, 6)
VALUES = range(5)
CFG = DomainConfig(value_domain=frozenset(range(8)), location_universe=frozenset(range(1, 9)))

CASES = {
    "[x] := y": ["x |-> y", "x ~> 2", "emp || x |-> y * y |-> -"],
    "y := [x]": ["x |-> y", "x ~> y && y = 2", "exists v. x |-> v * y |-> v"],
    "free(x)": ["emp", "y |-> -", "!(exists v. x ~> v)"],
    "x := cons(y, 0)": ["x |-> y, 0", "(exists v. x |-> v, 0) * true && x != 1", "exists v. x |-> v, 0 * v |-> -"],
}


def heaps(max_cells=3):
    for n in range(max_cells + 1):
        for dom in itertools.combinations(LOCS, n):
            for vals in itertools.product(VALUES, repeat=n):
                yield dict(zip(dom, vals))


def states(max_cells=3):
    hs = list(heaps(max_cells))
    for x, y in itertools.product(VALUES, repeat=2):
        for h in hs:
            yield State({"x": x, "y": y}, dict(h))


def operational(c, q, st) -> bool:
    if isinstance(c, Alloc):
        k = len(c.args)
        for l in sorted(CFG.value_domain):
            if l < 1 or any(l + i in st.heap for i in range(k)):
                continue
            out, _ = exec_command(c, st, alloc_base=l)
            assert out.state.store[c.var] == l
            if not sat(q, out.state, CFG):
                return False
        return True
    out, _ = exec_command(c, st)
    return isinstance(out, Final) and sat(q, out.state, CFG)


def disagreements(c_text, q_text, max_cells=3):
    c, q = parse_command(c_text), parse_assertion(q_text)
    pre = wp(c, q)
    bad, holds = [], 0
    for st in states(max_cells):
        a = sat(pre, st, CFG)
        holds += a
        if a != operational(c, q, st):
            bad.append(st)
    return bad, holds
