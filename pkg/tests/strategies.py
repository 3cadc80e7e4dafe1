"""Hypothesis generators for ASTs, stores and heaps."""

from hypothesis import strategies as st

from sepcheck.syntax.ast import (
    Alloc, And, Assign, BAnd, BImplies, BinOp, BNot, BoolConst, BOr, Emp, Eps, Eq,
    Exists, Forall, Free, If, Implies, ListRep, Lookup, Mutate, Not, Num, Or, PointsTo,
    Pure, SepConj, SepImp, SeqConcat, SeqCons, SeqEq, SeqRev, SeqVar, Skip, Var, While,
    make_seq,
)

INT_NAMES = ["x", "y", "z"]
SEQ_NAMES = ["@a", "@b"]

names = st.sampled_from(INT_NAMES)

aexps = st.recursive(
    st.one_of(st.integers(-3, 20).map(Num), names.map(Var)),
    lambda sub: st.builds(BinOp, st.sampled_from(["+", "-", "*"]), sub, sub),
    max_leaves=6,
)

bexps = st.recursive(
    st.one_of(st.booleans().map(BoolConst), st.builds(Eq, aexps, aexps)),
    lambda sub: st.one_of(
        st.builds(BNot, sub),
        st.builds(BAnd, sub, sub),
        st.builds(BOr, sub, sub),
        st.builds(BImplies, sub, sub),
    ),
    max_leaves=4,
)

seqs = st.recursive(
    st.one_of(st.just(Eps()), st.sampled_from(SEQ_NAMES).map(SeqVar)),
    lambda sub: st.one_of(
        st.builds(SeqCons, aexps, sub),
        st.builds(SeqConcat, sub, sub),
        st.builds(SeqRev, sub),
    ),
    max_leaves=4,
)

# Pure conditions are atomic: compound boolean structure in assertions is
# spelled with the assertion connectives, which is what the parser produces.
assertion_leaves = st.one_of(
    st.just(Emp()),
    st.builds(Pure, st.one_of(st.booleans().map(BoolConst), st.builds(Eq, aexps, aexps))),
    st.builds(PointsTo, aexps, aexps),
    st.builds(ListRep, seqs, aexps, aexps),
    st.builds(SeqEq, seqs, seqs),
)

assertions = st.recursive(
    assertion_leaves,
    lambda sub: st.one_of(
        st.builds(SepConj, sub, sub),
        st.builds(SepImp, sub, sub),
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
        st.builds(Implies, sub, sub),
        st.builds(Not, sub),
        st.builds(Exists, st.sampled_from(INT_NAMES + SEQ_NAMES), sub),
        st.builds(Forall, st.sampled_from(INT_NAMES + SEQ_NAMES), sub),
    ),
    max_leaves=6,
)

atomic_commands = st.one_of(
    st.just(Skip()),
    st.builds(Assign, names, aexps),
    st.builds(Alloc, names, st.lists(aexps, min_size=1, max_size=3).map(tuple)),
    st.builds(Lookup, names, aexps),
    st.builds(Mutate, aexps, aexps),
    st.builds(Free, aexps),
)


def _compound(sub):
    return st.one_of(
        st.lists(sub, min_size=2, max_size=3).map(make_seq),
        st.builds(If, bexps, sub, sub),
        st.builds(lambda b, inv, body: While(b, inv, body), bexps, st.one_of(st.none(), assertions), sub),
    )


commands = st.recursive(atomic_commands, _compound, max_leaves=6)

small_values = st.integers(0, 7)


def stores(variables=INT_NAMES, values=small_values):
    return st.fixed_dictionaries({v: values for v in variables})


def heaps(locations=range(1, 9), values=small_values, max_size=4):
    return st.dictionaries(st.sampled_from(list(locations)), values, max_size=max_size)
