"""Symbolic heaps, sequence normalization, entailment and frame inference."""

from .entail import ProofTrace, SearchLimit, entails, find_cell, frame  # noqa: F401
from .heap import (  # noqa: F401
    LS,
    PEq,
    PNeq,
    PT,
    SEq,
    Facts,
    Normalized,
    OutsideFragment,
    SymbolicHeap,
    View,
    from_assertion,
    normalize,
    prepare,
    to_assertion,
)
from .terms import Elem, Poly, SVar, items_of, items_to_seq, poly, seq_normalize  # noqa: F401


def entails_text(text: str, depth=None, program_vars=()):
    """Decide an entailment written ``P |- Q``."""
    from ..syntax.parser import parse_entailment

    p, q = parse_entailment(text)
    return entails(from_assertion(p), from_assertion(q), depth=depth, program_vars=program_vars)
