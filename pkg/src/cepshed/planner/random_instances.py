"""Seeded random planning instances on an integer grid, for bound checks."""

from __future__ import annotations

import numpy as np

from ..event_model import EventType, Query
from .model import ProblemInstance


def random_instance(
    rng: np.random.Generator,
    max_types: int = 10,
    max_queries: int = 8,
    max_length: int = 4,
    *,
    regular: bool = False,
    length: int | None = None,
    memory_fraction: tuple[float, float] = (0.2, 0.9),
    cpu_fraction: tuple[float, float] = (0.2, 0.9),
    min_memory: float | None = None,
) -> ProblemInstance:
    """Random instance with integer rates, sizes, match counts and budgets.

    ``regular`` forbids repeated types inside a pattern; ``length`` fixes every
    pattern length. Budgets are drawn as fractions of the all-keep totals.
    ``min_memory`` raises the memory budget to at least that value.
    """
    n = int(rng.integers(2, max_types + 1))
    nq = int(rng.integers(1, max_queries + 1))
    names = [f"E{j}" for j in range(n)]
    alphabet = [
        EventType(name, memory_cost=float(rng.integers(1, 3)), arrival_rate=float(rng.integers(1, 4)))
        for name in names
    ]
    queries = []
    for i in range(nq):
        size = length if length is not None else int(rng.integers(1, max_length + 1))
        if regular:
            size = min(size, n)
            pattern = tuple(names[j] for j in rng.choice(n, size=size, replace=False))
        else:
            pattern = tuple(names[j] for j in rng.integers(0, n, size=size))
        queries.append(
            Query(
                f"Q{i}", pattern, window=1.0,
                utility_weight=float(rng.integers(1, 6)),
                cpu_cost_per_match=float(rng.integers(1, 4)),
                expected_matches=float(rng.integers(1, 6)),
            )
        )
    draft = ProblemInstance(alphabet, queries)
    mem_total = float(draft.event_weight.sum())
    cpu_total = float(draft.cpu.sum())
    M = max(1.0, float(np.floor(mem_total * rng.uniform(*memory_fraction))))
    if min_memory is not None:
        M = max(M, float(np.ceil(min_memory)))
    C = max(1.0, float(np.floor(cpu_total * rng.uniform(*cpu_fraction))))
    return ProblemInstance(alphabet, queries, M, C)


def random_fitting_instance(rng: np.random.Generator, **kwargs) -> ProblemInstance:
    """Like :func:`random_instance` but with every query fitting memory (f < 1)."""
    inst = random_instance(rng, **kwargs)
    need = float(inst.query_weight.max()) + 1.0
    if inst.memory_budget < need:
        inst = inst.with_budgets(need + float(rng.integers(0, 4)), inst.cpu_budget)
    return inst
