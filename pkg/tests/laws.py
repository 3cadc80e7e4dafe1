"""Shared pieces for the algebraic-law checks on separating conjunction."""

import random

from sepcheck.assertions import DomainConfig, sat
from sepcheck.semantics import State
from sepcheck.syntax import parse_assertion
from sepcheck.syntax.ast import And, Exists, Forall, Or, SepConj

VALUES = frozenset(range(8))
LOCS = frozenset(range(1, 5))
CFG = DomainConfig(value_domain=VALUES, location_universe=LOCS)

POOL = [
    parse_assertion(t)
    for t in [
        "emp",
        "true",
        "false",
        "x |-> y",
        "y |-> 1",
        "x |-> -",
        "x |-> 1 || y |-> 2",
        "x = y",
        "x |-> 1, 2",
        "x ~> 3",
        "exists v. x |-> v",
        "emp && y = 2",
        "listrep(1 . eps, x, 0)",
        "!(x |-> 0)",
        "y |-> - * true",
    ]
]

# bodies for the quantifier laws: v occurs in the body and never in q
BODIES = [
    parse_assertion(t)
    for t in [
        "x |-> v",
        "v |-> y",
        "v |-> 1 || x |-> v",
        "y = v && emp",
        "x |-> v, v",
        "v |-> -",
        "v = 1 => x |-> v",
        "x |-> - && (v = 0 || true)",
        "emp || v != 3",
    ]
]


def random_state(rng: random.Random, max_cells: int = 4) -> State:
    store = {"x": rng.choice(sorted(LOCS | {0})), "y": rng.randrange(8)}
    n = rng.randint(0, max_cells)
    heap = {l: rng.randrange(8) for l in rng.sample(sorted(LOCS), n)}
    # bias towards heaps that the pool's points-to atoms can match
    for var in ("x", "y"):
        if store[var] in LOCS and rng.random() < 0.5:
            heap[store[var]] = rng.choice([1, 2, 3, store["y"]])
    while len(heap) > max_cells:
        heap.pop(rng.choice(sorted(heap)))
    return State(store, heap)


def holds(a, st):
    return sat(a, st, CFG)


def biconditional_laws(rng: random.Random):
    """Yield (name, lhs, rhs) triples drawn from the pool."""
    p1, p2, p3, q = (rng.choice(POOL) for _ in range(4))
    yield "p * emp <=> p", SepConj(p1, parse_assertion("emp")), p1
    yield "p1 * p2 <=> p2 * p1", SepConj(p1, p2), SepConj(p2, p1)
    yield "(p1 * p2) * p3 <=> p1 * (p2 * p3)", SepConj(SepConj(p1, p2), p3), SepConj(p1, SepConj(p2, p3))
    yield "(p1 || p2) * q <=> (p1 * q) || (p2 * q)", SepConj(Or(p1, p2), q), Or(SepConj(p1, q), SepConj(p2, q))
    body = rng.choice(BODIES)
    yield "(exists v. p) * q <=> exists v. (p * q)", SepConj(Exists("v", body), q), Exists("v", SepConj(body, q))


def forward_laws(rng: random.Random):
    p1, p2, q = (rng.choice(POOL) for _ in range(3))
    yield "(p1 && p2) * q => (p1 * q) && (p2 * q)", SepConj(And(p1, p2), q), And(SepConj(p1, q), SepConj(p2, q))
    body = rng.choice(BODIES)
    yield "(forall v. p) * q => forall v. (p * q)", SepConj(Forall("v", body), q), Forall("v", SepConj(body, q))


# Stored counterexamples to the converse of each one-directional law, with
# store x=10, y=11 and heap {10:1, 11:2}.
COUNTER_STATE = State({"x": 10, "y": 11}, {10: 1, 11: 2})
COUNTER_CFG = DomainConfig(value_domain=frozenset(range(8)) | {10, 11})
CONVERSE_AND = (
    # (p1 * q) && (p2 * q) holds but (p1 && p2) * q does not
    parse_assertion("(x |-> 1 * (x |-> 1 || y |-> 2)) && (y |-> 2 * (x |-> 1 || y |-> 2))"),
    parse_assertion("(x |-> 1 && y |-> 2) * (x |-> 1 || y |-> 2)"),
)
CONVERSE_FORALL = (
    parse_assertion("forall v. ((v = 0 && x |-> 1) || (v != 0 && y |-> 2)) * (x |-> 1 || y |-> 2)"),
    parse_assertion("(forall v. (v = 0 && x |-> 1) || (v != 0 && y |-> 2)) * (x |-> 1 || y |-> 2)"),
)
