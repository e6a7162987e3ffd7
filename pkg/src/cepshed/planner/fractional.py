"""Fractional memory shedding: simplex normalisation, grid search, curvature witness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import kernels
from ..errors import AllQueriesLinear, GridTooLarge, InputError, NonPositiveBudget
from .model import (
    Coupling,
    FractionalPlan,
    Guarantee,
    GuaranteeKind,
    PlanEvaluation,
    ProblemInstance,
    evaluate_fractional,
    fractional_query_rates,
)

GRID_CAP = 2_000_000


@dataclass(frozen=True)
class NormalizedInstance:
    """Coordinates ``x'_j = lambda_j m_j x_j / M`` living on the simplex.

    ``bounds`` are the raw upper limits ``lambda_j m_j / M``; ``scale`` maps a
    simplex coordinate back to a sampling rate.
    """

    instance: ProblemInstance
    bounds: np.ndarray
    scale: np.ndarray
    degenerate: bool

    def to_rates(self, point: np.ndarray) -> np.ndarray:
        return np.minimum(np.asarray(point, float) * self.scale, 1.0)


def fmls_normalize(inst: ProblemInstance) -> NormalizedInstance:
    M = inst.require_memory()
    if M <= 0:
        raise NonPositiveBudget("the memory budget must be positive")
    bounds = inst.event_weight / M
    # keeping everything fits when the bounds sum to at most one
    return NormalizedInstance(inst, bounds, M / inst.event_weight, bool(bounds.sum() <= 1.0))


def grid_size(n: int, k: int) -> int:
    return math.comb(n + k - 1, n - 1) if n > 0 else 1


def grid_bound_factor(k: int, d: int) -> float:
    """``k! / ((k-d)! k^d)``, zero when ``k < d``."""
    if k < d:
        return 0.0
    return math.perm(k, d) / k**d


def _flat_positions(inst: ProblemInstance) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.zeros(inst.num_queries + 1, np.int64)
    offsets[1:] = np.cumsum([len(p) for p in inst.positions])
    flat = np.array([j for p in inst.positions for j in p], np.int64)
    return offsets, flat


def fmls_grid_search(
    inst: ProblemInstance, k: int, cap: int = GRID_CAP
) -> tuple[FractionalPlan, PlanEvaluation]:
    """Best k-grid point of the simplex, mapped to rates ``min(1, q_j M / (lambda_j m_j))``.

    Every mapped point respects the memory budget because the simplex
    coordinates sum to one.
    """
    if int(k) != k or k < 1:
        raise InputError(f"grid resolution k must be a positive integer, got {k!r}")
    k = int(k)
    norm = fmls_normalize(inst)
    n = inst.num_types
    if norm.degenerate or n == 0:
        plan = FractionalPlan.from_vectors(inst, np.ones(n), np.ones(inst.num_queries))
        ev = evaluate_fractional(inst, plan, Coupling.EQUALITY)
        return plan, ev.with_guarantee(Guarantee(GuaranteeKind.EXACT, k, 1.0, {"degenerate": True}))
    size = grid_size(n, k)
    if size > cap:
        raise GridTooLarge(f"the k={k} grid over {n} types has {size} points (cap {cap})")
    offsets, flat = _flat_positions(inst)
    _, best_q = kernels.grid_search(k, norm.scale, offsets, flat, inst.value.astype(float))
    # same arithmetic as the kernel so the plan reproduces its value
    x = np.minimum(best_q / k * norm.scale, 1.0)
    plan = FractionalPlan.from_vectors(inst, x, fractional_query_rates(inst, x))
    ev = evaluate_fractional(inst, plan, Coupling.EQUALITY)
    return plan, ev.with_guarantee(_grid_guarantee(inst, norm, k, size, best_q))


def _grid_guarantee(inst, norm, k, size, best_q) -> Guarantee:
    extras = {"grid_points": size, "grid_point": [int(v) for v in best_q]}
    lengths = {len(q) for q in inst.queries}
    if inst.queries and all(q.is_regular for q in inst.queries) and len(lengths) == 1:
        d = lengths.pop()
        beta = min(float(norm.bounds.min()), 1.0) ** d
        extras.update(beta=beta, d=d)
        return Guarantee(GuaranteeKind.GRID_RELATIVE, k, beta * grid_bound_factor(k, d), extras)
    if bool(np.all(norm.bounds >= 1.0)):
        return Guarantee(GuaranteeKind.RELATIVE, k, None, extras)
    return Guarantee(GuaranteeKind.HEURISTIC, k, None, extras)


@dataclass(frozen=True)
class CurvatureWitness:
    query_id: str
    direction: dict[str, float]
    point: dict[str, float]
    step: float
    curvature: float


def _objective_exact(inst: ProblemInstance, x: list[Fraction], values: list[Fraction]) -> Fraction:
    total = Fraction(0)
    for v, pos in zip(values, inst.positions):
        term = v
        for j in pos:
            term *= x[j]
        total += term
    return total


def nonconcavity_witness(inst: ProblemInstance, h: float = 1e-3) -> CurvatureWitness:
    """Second central difference of the fractional objective at the simplex centre.

    The direction follows the most valuable multi-event query: the sum of two
    of its distinct types' unit vectors, or one unit vector when it repeats a
    single type. Evaluated in exact rational arithmetic, so the sign is reliable.
    """
    multi = [i for i, q in enumerate(inst.queries) if len(q) >= 2]
    if not multi:
        raise AllQueriesLinear("every query has a single event; the objective is linear")
    i = max(multi, key=lambda i: (inst.value[i], -i))
    types = inst.members[i][:2]
    n = inst.num_types
    direction = [Fraction(0)] * n
    for j in types:
        direction[j] = Fraction(1)
    centre = [Fraction(1, n)] * n
    step = Fraction(h)
    values = [Fraction(float(v)) for v in inst.value]

    def at(sign: int) -> Fraction:
        return _objective_exact(inst, [c + sign * step * d for c, d in zip(centre, direction)], values)

    curvature = (at(1) - 2 * at(0) + at(-1)) / step**2
    return CurvatureWitness(
        inst.query_names[i],
        {inst.type_names[j]: float(direction[j]) for j in range(n) if direction[j]},
        {name: float(c) for name, c in zip(inst.type_names, centre)},
        float(step),
        float(curvature),
    )
