import itertools
import random

import pytest

from sepcheck.assertions import DomainConfig, Unsupported, is_precise, models_of, sat
from sepcheck.semantics import EvalError, State
from sepcheck.syntax import parse_assertion

import laws

S = {"x": 10, "y": 11}
H1 = {10: 1}
H2 = {11: 2}
H12 = {10: 1, 11: 2}
SUBHEAPS = [
    {l: v for l, v in zip((10, 11), choice) if v is not None}
    for choice in itertools.product([None, 1, 2], repeat=2)
]

TABLE = [
    ("x |-> 1 * y |-> 2", [H12]),
    ("x |-> 1 && x |-> 1", [H1]),
    ("x |-> 1 * x |-> 1", []),
    ("x |-> 1 || y |-> 2", [H1, H2]),
    ("x |-> 1 * (x |-> 1 || y |-> 2)", [H12]),
    ("(x |-> 1 || y |-> 2) * (x |-> 1 || y |-> 2)", [H12]),
    ("x |-> 1 * y |-> 2 * (x |-> 1 || y |-> 2)", []),
]


def brute_models(a, store, locs, values, max_cells=3):
    out = set()
    for n in range(max_cells + 1):
        for dom in itertools.combinations(sorted(locs), n):
            for vals in itertools.product(sorted(values), repeat=n):
                h = dict(zip(dom, vals))
                if sat(a, State(dict(store), h), DomainConfig(frozenset(values), frozenset(locs))):
                    out.add(tuple(sorted(h.items())))
    return out


def test_nine_subheaps():
    assert len(SUBHEAPS) == 9
    assert len({tuple(sorted(h.items())) for h in SUBHEAPS}) == 9


@pytest.mark.parametrize("text,models", TABLE)
def test_assertion_table(text, models):
    a = parse_assertion(text)
    for h in SUBHEAPS:
        assert sat(a, State(S, h)) == (h in models), (text, h)


def test_basic_examples():
    assert sat(parse_assertion("emp"), State(S, {}))
    assert not sat(parse_assertion("emp"), State(S, H1))
    assert sat(parse_assertion("x |-> 1"), State(S, H1))
    assert not sat(parse_assertion("x |-> 1"), State(S, H12))
    assert sat(parse_assertion("x = 10"), State(S, H12))  # pure: heap unconstrained
    assert sat(parse_assertion("x ~> 1"), State(S, H12))
    assert sat(parse_assertion("x |-> 1, 2"), State(S, H12))
    assert not sat(parse_assertion("x |-> 1, 2"), State(S, {10: 1, 11: 2, 12: 0}))
    assert sat(parse_assertion("exists v. x |-> v * y |-> v + 1"), State(S, H12))
    assert sat(parse_assertion("forall v. v = v"), State(S, {}))
    assert not sat(parse_assertion("forall v. x |-> v"), State(S, H1))


def test_unbound_variable_is_an_error():
    with pytest.raises(EvalError):
        sat(parse_assertion("z |-> 1"), State(S, {}))


def test_listrep():
    # list 1, 2 at 10 -> 20 -> nil
    h = {10: 1, 11: 20, 20: 2, 21: 0}
    st = State({"i": 10, "@a": (1, 2)}, h)
    assert sat(parse_assertion("listrep(@a, i, nil)"), st)
    assert sat(parse_assertion("listrep(1 . 2 . eps, i, nil)"), st)
    assert not sat(parse_assertion("listrep(rev(@a), i, nil)"), st)
    assert sat(parse_assertion("listrep(1 . eps, i, 20) * listrep(2 . eps, 20, nil)"), st)
    assert sat(parse_assertion("listrep(eps, i, i)"), State({"i": 10}, {}))
    assert sat(parse_assertion("exists @b. listrep(@b, i, nil) && @b = 1 . 2 . eps"), st)
    cyclic = {10: 1, 11: 10}
    assert not sat(parse_assertion("listrep(1 . 1 . eps, i, nil)"), State({"i": 10}, cyclic))


def test_wand():
    st = State(S, H1)
    assert sat(parse_assertion("y |-> 2 -* (x |-> 1 * y |-> 2)"), st)
    assert not sat(parse_assertion("y |-> 2 -* (x |-> 1)"), st)
    # the extension cannot overlap the current heap, so this is vacuous
    assert sat(parse_assertion("x |-> 3 -* false"), st)
    assert sat(parse_assertion("(exists v. y |-> v) -* (exists v. y |-> v * x |-> 1)"), st)


def test_wand_needs_precise_left():
    with pytest.raises(Unsupported):
        sat(parse_assertion("(x |-> 1 * true) -* emp"), State(S, {}))
    with pytest.raises(Unsupported):
        sat(parse_assertion("true -* emp"), State(S, {}))


def test_precise_fragment():
    for text in ["emp", "x |-> 1", "x |-> 1 * y |-> 2", "exists v. x |-> v", "x |-> 1 && y = 2", "listrep(@a, i, nil)"]:
        assert is_precise(parse_assertion(text))
    for text in ["true", "x ~> 1", "x |-> 1 -* emp", "!emp"]:
        assert not is_precise(parse_assertion(text))


# -- models_of --------------------------------------------------------------------


def test_models_of_examples():
    assert list(models_of(parse_assertion("x |-> 1"), {"x": 10})) == [{10: 1}]
    assert list(models_of(parse_assertion("emp"), {})) == [{}]
    assert list(models_of(parse_assertion("x |-> 1 * y |-> 2"), S)) == [H12]
    got = list(models_of(parse_assertion("x |-> -"), {"x": 10}, DomainConfig(value_domain=frozenset({0, 1, 2}))))
    assert sorted(map(lambda h: tuple(h.items()), got)) == [((10, 0),), ((10, 1),), ((10, 2),)]
    assert list(models_of(parse_assertion("x |-> 1 * x |-> 1"), {"x": 10})) == []


PRECISE = [
    "emp",
    "x |-> y",
    "x |-> 1, 2",
    "exists v. x |-> v",
    "exists p. x |-> p * p |-> 0",
    "x |-> 1 || y |-> 2",
    "x |-> - && y = 2",
    "listrep(1 . 0 . eps, x, nil)",
    "exists @a. listrep(@a, x, nil)",
    "x |-> 1 * (y |-> 0 || emp)",
]


@pytest.mark.parametrize("text", PRECISE)
@pytest.mark.parametrize("store", [{"x": 1, "y": 2}, {"x": 2, "y": 1}, {"x": 3, "y": 3}])
def test_models_of_matches_brute_force(text, store):
    a = parse_assertion(text)
    # values cover the locations so pointer cells and data cells share one range
    locs, values = {1, 2, 3, 4}, {0, 1, 2, 3, 4}
    cfg = DomainConfig(frozenset(values), frozenset(locs), seq_len=2)
    got = {tuple(sorted(h.items())) for h in models_of(a, store, cfg)}
    want = brute_models(a, store, locs, values, max_cells=4)
    if "@a" in text:
        # sequence quantifiers range over lists of length <= seq_len
        want = {h for h in want if len(h) <= 4}
    assert got == want


def test_models_are_models():
    rng = random.Random(3)
    for text in PRECISE:
        a = parse_assertion(text)
        for _ in range(5):
            store = {"x": rng.randint(1, 6), "y": rng.randint(0, 6)}
            for h in itertools.islice(models_of(a, store), 20):
                assert sat(a, State(store, h))


# -- algebraic laws -------------------------------------------------------------------


def test_laws_randomized():
    rng = random.Random(11)
    nontrivial = 0
    for _ in range(400):
        st = laws.random_state(rng)
        for name, lhs, rhs in laws.biconditional_laws(rng):
            left = laws.holds(lhs, st)
            assert left == laws.holds(rhs, st), (name, st)
            nontrivial += left
        for name, lhs, rhs in laws.forward_laws(rng):
            if laws.holds(lhs, st):
                assert laws.holds(rhs, st), (name, st)
    assert nontrivial > 100


def _small_states():
    locs = sorted(laws.LOCS)
    for x, y in itertools.product([1, 2], [1, 2]):
        for n in range(3):
            for dom in itertools.combinations(locs[:3], n):
                for vals in itertools.product([1, 2], repeat=n):
                    yield State({"x": x, "y": y}, dict(zip(dom, vals)))


def test_laws_exhaustive_small_heaps():
    states = list(_small_states())
    pool = laws.POOL[:10]
    for p, q in itertools.product(pool, repeat=2):
        for st in states:
            assert laws.holds(laws.SepConj(p, q), st) == laws.holds(laws.SepConj(q, p), st)
            assert laws.holds(laws.SepConj(p, parse_assertion("emp")), st) == laws.holds(p, st)


def test_hook_is_points_to_star_true():
    rng = random.Random(5)
    for _ in range(200):
        st = laws.random_state(rng)
        assert laws.holds(parse_assertion("x ~> y"), st) == laws.holds(parse_assertion("(x |-> y) * true"), st)


def test_multi_cell_is_exact_block():
    rng = random.Random(6)
    a = parse_assertion("x |-> 1, y")
    for _ in range(300):
        st = laws.random_state(rng)
        x, y = st.store["x"], st.store["y"]
        exact = x >= 1 and st.heap == {x: 1, x + 1: y}
        assert laws.holds(a, st) == exact


def test_converse_counterexamples():
    st, cfg = laws.COUNTER_STATE, laws.COUNTER_CFG
    for weak, strong in (laws.CONVERSE_AND, laws.CONVERSE_FORALL):
        assert sat(weak, st, cfg) and not sat(strong, st, cfg)
