import itertools

import pytest

from sepcheck.assertions import DomainConfig, Unsupported, models_of
from sepcheck.cli import parse_heap, parse_store
from sepcheck.fuzz import FuzzConfig, fuzz_triple, sample_states
from sepcheck.semantics import Abort, Final, State, exec_command
from sepcheck.syntax import parse_assertion, parse_command, parse_program
from sepcheck.verifier import check_triple

from conftest import corpus_text

A = parse_assertion
C = parse_command


def corpus(name):
    prog = parse_program(corpus_text(name))
    return prog.pre, prog.body, prog.post, list(prog.variables)


def test_swap_has_no_failures():
    p, c, q, vs = corpus("swap.sl")
    report = fuzz_triple(p, c, q, FuzzConfig(samples=100, seed=7), vs)
    assert report.samples == 100 and report.ok and not report.out_of_fuel


def test_unallocated_mutation_is_found():
    report = fuzz_triple(A("(x |-> -) && !(x = y)"), C("[y] := 1"), A("true"), FuzzConfig(samples=60, seed=1), ["x", "y"])
    assert report.aborts > 0
    f = report.failures[0]
    # the dump replays through the command-line literal syntax
    st = State(parse_store(f.store), parse_heap(f.heap))
    assert isinstance(exec_command(C("[y] := 1"), st)[0], Abort)
    assert "--store" in f.replay() and "--heap" in f.replay()


def _walk(heap, start):
    out, cur = [], start
    while cur != 0:
        out.append(heap[cur])
        cur = heap[cur + 1]
    return tuple(out)


def test_reversal_reverses():
    p, c, q, vs = corpus("list_reverse.sl")
    cfg = FuzzConfig(samples=100, seed=3)
    report = fuzz_triple(p, c, q, cfg, vs)
    assert report.ok and report.samples == 100
    lengths = set()
    for st in sample_states(p, vs, cfg):
        out, _ = exec_command(c, st)
        assert isinstance(out, Final)
        alpha = st.store["@a0"]
        lengths.add(len(alpha))
        assert _walk(out.state.heap, out.state.store["j"]) == tuple(reversed(alpha))
    assert lengths == {0, 1, 2, 3, 4}


def test_determinism():
    p, c, q, vs = corpus("abort_demo.sl")
    cfg = FuzzConfig(samples=30, seed=42)
    assert fuzz_triple(p, c, q, cfg, vs).to_dict() == fuzz_triple(p, c, q, cfg, vs).to_dict()
    other = fuzz_triple(p, c, q, FuzzConfig(samples=30, seed=43), vs).to_dict()
    assert other["seed"] == 43


def test_unsatisfiable_precondition_samples_nothing():
    assert sample_states(A("x |-> 1 * x |-> 1"), ["x"], FuzzConfig(samples=10)) == []


def test_imprecise_precondition_is_rejected():
    with pytest.raises(Unsupported):
        sample_states(A("x |-> 1 * true"), ["x"])


def test_samples_are_distinct_models():
    cfg = FuzzConfig(samples=50, seed=5)
    got = sample_states(A("x |-> y * y |-> -"), ["x", "y"], cfg)
    assert len({s.key() for s in got}) == len(got) == 50
    for s in got:
        assert s.heap[s.store["x"]] == s.store["y"] and len(s.heap) == 2


def chains(alpha, start, locs):
    """Every acyclic chain of two-cell nodes from ``start`` to nil holding ``alpha``."""
    out = set()
    if not alpha:
        return {()} if start == 0 else set()
    for rest in itertools.permutations(sorted(locs), len(alpha) - 1):
        nodes = (start,) + rest
        cells = [c for n in nodes for c in (n, n + 1)]
        if len(set(cells)) != len(cells) or not set(cells) <= set(locs):
            continue
        heap = {}
        for k, n in enumerate(nodes):
            heap[n] = alpha[k]
            heap[n + 1] = nodes[k + 1] if k + 1 < len(nodes) else 0
        out.add(tuple(sorted(heap.items())))
    return out


@pytest.mark.parametrize("alpha", [(), (3,), (1, 2), (0, 0, 5)])
@pytest.mark.parametrize("start", [0, 1, 2])
def test_listrep_materialization(alpha, start):
    locs = frozenset(range(1, 8))
    cfg = FuzzConfig(samples=100, seed=1, attempts_per_sample=20, domain=DomainConfig(frozenset(range(6)), locs))
    text = "listrep(" + "".join(f"{a} . " for a in alpha) + "eps, i, nil)"
    want = chains(alpha, start, locs)
    got = {tuple(sorted(h.items())) for h in models_of(A(text), {"i": start}, cfg.domain)}
    assert got == want
    sampled = [s for s in sample_states(A(text), ["i"], cfg) if s.store["i"] == start]
    assert {tuple(sorted(s.heap.items())) for s in sampled} <= want


PROVEN_TRIPLES = [
    ("x |-> 5", "y := [x]; [x] := y + 1", "x |-> 6", ["x", "y"]),
    ("x |-> - * y |-> 3", "[x] := 4", "x |-> 4 * y |-> 3", ["x", "y"]),
    ("emp", "x := cons(1, 2); free(x + 1)", "x |-> 1", ["x"]),
    ("listrep(a . @a, i, nil)", "k := [i + 1]; free(i); free(i + 1); i := k", "listrep(@a, i, nil)", ["i", "k"]),
]


@pytest.mark.parametrize("pre,cmd,post,vs", PROVEN_TRIPLES)
def test_checker_soundness_on_small_triples(pre, cmd, post, vs):
    r = check_triple(A(pre), C(cmd), A(post), program_vars=tuple(vs))
    assert r.proven, r.render()
    report = fuzz_triple(A(pre), C(cmd), A(post), FuzzConfig(samples=100, seed=9), vs)
    assert report.samples > 0 and report.ok, report.render()
