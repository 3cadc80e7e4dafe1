"""Differential testing of triples against the interpreter.

States are sampled from the precondition: store variables (and ghosts) are
drawn uniformly from the value domain, sequence ghosts as short sequences,
and the heap is the first model ``models_of`` produces under a shuffled
candidate order.  Each state is run and the final state checked against the
postcondition.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from typing import Optional

from .assertions import DomainConfig, Unsupported, is_precise, is_pure, models_of, sat
from .semantics import Abort, EvalError, Final, OutOfFuel, State, exec_command
from .syntax.ast import is_seq_name
from .syntax.vars import assertion_vars

DEFAULT_DOMAIN = DomainConfig(
    value_domain=frozenset(range(8)), location_universe=frozenset(range(1, 17))
)


@dataclass(frozen=True)
class FuzzConfig:
    samples: int = 100
    seed: int = 0
    domain: DomainConfig = DEFAULT_DOMAIN
    fuel: int = 10_000
    alloc_base: int = 1
    attempts_per_sample: int = 200


def store_literal(store: dict) -> str:
    parts = []
    for k, v in store.items():
        if isinstance(v, tuple):
            parts.append(f"{k}=[{' '.join(map(str, v))}]")
        else:
            parts.append(f"{k}={v}")
    return ",".join(parts)


def heap_literal(heap: dict) -> str:
    return ",".join(f"{l}:{heap[l]}" for l in sorted(heap))


def _shuffler(rng: random.Random):
    return lambda xs: rng.sample(list(xs), len(xs))


def _random_heap(rng: random.Random, cfg: FuzzConfig) -> dict:
    locs = sorted(cfg.domain.location_universe or range(1, 17))
    values = sorted(cfg.domain.value_domain or range(8))
    n = rng.randint(0, min(3, len(locs)))
    return {l: rng.choice(values) for l in rng.sample(locs, n)}


def sample_states(p, variables, cfg: FuzzConfig = FuzzConfig()) -> list[State]:
    """Up to ``cfg.samples`` distinct states satisfying ``p``.

    ``p`` must be precise once the store is fixed, or heap-independent (then
    heaps are drawn at random).  Returns an empty list when no sampled store
    admits a model.
    """
    pure = is_pure(p)
    if not pure and not is_precise(p):
        raise Unsupported("sampling needs a precise precondition")
    rng = random.Random(cfg.seed)
    values = sorted(cfg.domain.value_domain or range(8))
    names = list(variables) + sorted(assertion_vars(p) - set(variables))
    out, seen = [], set()
    for _ in range(cfg.samples * cfg.attempts_per_sample):
        if len(out) >= cfg.samples:
            break
        store = {}
        for v in names:
            if is_seq_name(v):
                store[v] = tuple(rng.choice(values) for _ in range(rng.randint(0, cfg.domain.seq_len)))
            else:
                store[v] = rng.choice(values)
        if pure:
            heap = _random_heap(rng, cfg)
            if not sat(p, State(store, heap), cfg.domain):
                continue
        else:
            heap = next(models_of(p, store, cfg.domain, order=_shuffler(rng)), None)
            if heap is None:
                continue
        st = State(store, heap)
        if st.key() in seen:
            continue
        seen.add(st.key())
        out.append(st)
    return out


@dataclass
class Failure:
    index: int
    kind: str  # "abort" | "post" | "error"
    store: str
    heap: str
    detail: str = ""

    def replay(self) -> str:
        return f"--store '{self.store}' --heap '{self.heap}'"


@dataclass
class FuzzReport:
    seed: int
    config: dict
    samples: int
    failures: list = field(default_factory=list)
    out_of_fuel: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def aborts(self) -> int:
        return sum(f.kind == "abort" for f in self.failures)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "config": self.config,
            "samples": self.samples,
            "failures": [asdict(f) for f in self.failures],
            "out_of_fuel": [asdict(f) for f in self.out_of_fuel],
        }

    def render(self) -> str:
        lines = [f"seed {self.seed}, {self.samples} samples"]
        for f in self.failures:
            lines.append(f"  sample {f.index}: {f.detail or f.kind}")
            lines.append(f"    {f.replay()}")
        for f in self.out_of_fuel:
            lines.append(f"  sample {f.index}: out of fuel")
            lines.append(f"    {f.replay()}")
        if not self.samples:
            lines.append("no states satisfy the precondition within the sampling domains")
        lines.append(f"{len(self.failures)} failures, {len(self.out_of_fuel)} out of fuel")
        return "\n".join(lines)


def _config_dict(cfg: FuzzConfig) -> dict:
    d = cfg.domain
    return {
        "samples": cfg.samples,
        "fuel": cfg.fuel,
        "alloc_base": cfg.alloc_base,
        "value_domain": sorted(d.value_domain) if d.value_domain is not None else None,
        "location_universe": sorted(d.location_universe) if d.location_universe is not None else None,
        "seq_len": d.seq_len,
    }


def fuzz_triple(p, c, q, cfg: FuzzConfig = FuzzConfig(), variables: Optional[list] = None) -> FuzzReport:
    """Run ``c`` from states sampled from ``p`` and check ``q`` on every final state."""
    from .verifier.subst import modified_vars

    if variables is None:
        variables = sorted(modified_vars(c))
    states = sample_states(p, variables, cfg)
    report = FuzzReport(cfg.seed, _config_dict(cfg), len(states))
    for i, st in enumerate(states):
        lit = (store_literal(st.store), heap_literal(st.heap))
        try:
            outcome, _trace = exec_command(c, st, cfg.fuel, cfg.alloc_base)
        except EvalError as exc:
            report.failures.append(Failure(i, "error", *lit, str(exc)))
            continue
        if isinstance(outcome, Abort):
            report.failures.append(Failure(i, "abort", *lit, outcome.describe()))
        elif isinstance(outcome, OutOfFuel):
            report.out_of_fuel.append(Failure(i, "out_of_fuel", *lit))
        elif isinstance(outcome, Final):
            try:
                good = sat(q, outcome.state, cfg.domain)
            except (Unsupported, EvalError) as exc:
                report.failures.append(Failure(i, "error", *lit, str(exc)))
                continue
            if not good:
                final = outcome.state
                detail = f"postcondition fails at store {{{store_literal(final.store)}}} heap {{{heap_literal(final.heap)}}}"
                report.failures.append(Failure(i, "post", *lit, detail))
    return report
