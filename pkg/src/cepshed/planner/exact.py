"""Exact solvers: exhaustive oracles, knapsack DPs and the fractional CPU greedy."""

from __future__ import annotations

import math

import numpy as np

from .. import kernels
from ..errors import (
    ComponentTooLarge,
    InputError,
    InstanceTooLarge,
    UnsupportedVariant,
)
from .discretize import check_cells, discretize
from .model import (
    FEAS_TOL,
    Coupling,
    FractionalPlan,
    Guarantee,
    GuaranteeKind,
    IntegralPlan,
    PlanEvaluation,
    ProblemInstance,
    Variant,
    evaluate_fractional,
    evaluate_integral,
    plan_from_events,
    plan_from_queries,
)

BRUTE_FORCE_LIMIT = 20
EXACT = Guarantee(GuaranteeKind.EXACT)


def _bits_to_vector(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> (n - 1 - j)) & 1 for j in range(n)], bool)


def _best_submask(value: np.ndarray, cost: np.ndarray, budget: float, nq: int):
    """For every availability mask, the best budget-feasible submask.

    Ties keep the smallest submask. Returns (best value, argmax submask).
    """
    size = 1 << nq
    masks = np.arange(size, dtype=np.int64)
    best = np.where(cost <= budget + FEAS_TOL, value, -np.inf)
    arg = masks.copy()
    for i in range(nq):
        bit = np.int64(1 << i)
        has = (masks & bit) != 0
        src = masks[has] ^ bit
        cand, cand_arg = best[src], arg[src]
        cur, cur_arg = best[has], arg[has]
        take = (cand > cur) | ((cand == cur) & (cand_arg < cur_arg))
        best[has] = np.where(take, cand, cur)
        arg[has] = np.where(take, cand_arg, cur_arg)
    return best, arg


def _exact_sum_table(values: np.ndarray) -> np.ndarray:
    """Correctly rounded subset sums, so equal exact sums compare equal."""
    n = values.shape[0]
    return np.array(
        [math.fsum(values[i] for i in range(n) if (m >> (n - 1 - i)) & 1) for m in range(1 << n)]
    )


def brute_force_integral(
    inst: ProblemInstance, variant: Variant | str, limit: int = BRUTE_FORCE_LIMIT
) -> tuple[IntegralPlan, PlanEvaluation]:
    """Exhaustive optimum of an integral variant.

    Memory variants scan every event subset (then, for the dual variant, the
    best CPU-feasible set of supported queries); the CPU variant scans every
    query subset. Ties go to the lexicographically smallest keep-vector.
    """
    variant = Variant(variant)
    n, nq = inst.num_types, inst.num_queries
    if variant in (Variant.FMLS, Variant.FCLS):
        raise UnsupportedVariant(f"no exhaustive search for fractional variant {variant.value}")
    if n > limit or nq > limit:
        raise InstanceTooLarge(f"{n} types / {nq} queries exceed the brute-force limit {limit}")
    values = _exact_sum_table(inst.value)

    if variant is Variant.ICLS:
        C = _cpu_budget(inst)
        cost = _exact_sum_table(inst.cpu)
        feasible = np.where(cost <= C + FEAS_TOL, values, -np.inf)
        mask = int(np.argmax(feasible))
        plan = plan_from_queries(inst, _bits_to_vector(mask, nq))
        ev = evaluate_integral(inst, plan, Coupling.INEQUALITY)
        return plan, ev.with_guarantee(EXACT)

    M = inst.require_memory()
    if variant is Variant.IMLS:
        table, arg = values, np.arange(1 << nq, dtype=np.int64)
    else:
        C = _cpu_budget(inst)
        table, arg = _best_submask(values, _exact_sum_table(inst.cpu), C, nq)
    _, best_mask = kernels.scan_event_subsets(
        inst.event_weight, inst.query_masks, table, M + FEAS_TOL
    )
    keep = _bits_to_vector(int(best_mask), n)
    if variant is Variant.IMLS:
        plan = plan_from_events(inst, keep)
        ev = evaluate_integral(inst, plan, Coupling.EQUALITY)
    else:
        avail = 0
        for i in range(nq):
            if all(keep[j] for j in inst.members[i]):
                avail |= 1 << (nq - 1 - i)
        y = _bits_to_vector(int(arg[avail]), nq)
        plan = IntegralPlan.from_vectors(inst, keep, y)
        ev = evaluate_integral(inst, plan, Coupling.INEQUALITY)
    return plan, ev.with_guarantee(EXACT)


def _cpu_budget(inst: ProblemInstance) -> float:
    return inst.require_cpu()


def event_components(inst: ProblemInstance) -> list[list[int]]:
    parent = list(range(inst.num_types))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for mem in inst.members:
        for j in mem[1:]:
            ra, rb = find(mem[0]), find(j)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for j in range(inst.num_types):
        groups.setdefault(find(j), []).append(j)
    return sorted(groups.values())


def imls_multitenant_dp(
    inst: ProblemInstance,
    resolution: float | None = None,
    k_max: int = 16,
    exact: bool = False,
) -> tuple[IntegralPlan, PlanEvaluation]:
    """Exact IMLS for instances whose event-sharing components are small.

    Each connected component of the type/query hypergraph contributes a
    Pareto list of (memory, utility) options from enumerating its subsets;
    a group knapsack over integer memory picks one option per component.
    """
    M = inst.require_memory()
    grid = discretize(inst.event_weight, M, resolution, require_exact=exact)
    comps = event_components(inst)
    big = max((len(c) for c in comps), default=0)
    if big > k_max:
        raise ComponentTooLarge(f"a component has {big} event types (limit {k_max})")
    offsets = [0]
    opt_mem: list[int] = []
    opt_val: list[float] = []
    opt_keep: list[tuple[int, ...]] = []
    for comp in comps:
        s = len(comp)
        local = {j: s - 1 - k for k, j in enumerate(comp)}
        qs = [i for i, mem in enumerate(inst.members) if mem[0] in local]
        qmask = [sum(1 << local[j] for j in inst.members[i]) for i in qs]
        options = []
        for mask in range(1 << s):
            mem_int = int(sum(grid.weights[j] for j in comp if (mask >> local[j]) & 1))
            val = math.fsum(inst.value[i] for i, qm in zip(qs, qmask) if mask & qm == qm)
            options.append((mem_int, -val, mask))
        options.sort()
        best_val = -math.inf
        for mem_int, neg_val, mask in options:
            if -neg_val > best_val and mem_int <= grid.capacity:
                best_val = -neg_val
                opt_mem.append(mem_int)
                opt_val.append(-neg_val)
                opt_keep.append(tuple(j for j in comp if (mask >> local[j]) & 1))
        offsets.append(len(opt_mem))
    check_cells(len(comps) * (grid.capacity + 1), "multitenant DP")
    _, picked = kernels.group_knapsack(
        np.array(offsets, np.int64), np.array(opt_mem, np.int64),
        np.array(opt_val, float), int(grid.capacity),
    )
    keep = np.zeros(inst.num_types, bool)
    for o in picked:
        keep[list(opt_keep[int(o)])] = True
    plan = plan_from_events(inst, keep)
    ev = evaluate_integral(inst, plan, Coupling.EQUALITY)
    return plan, ev.with_guarantee(
        Guarantee(GuaranteeKind.EXACT, extras={**grid.describe(), "components": len(comps)})
    )


def icls_dp(inst: ProblemInstance, resolution: float | None = None) -> tuple[IntegralPlan, PlanEvaluation]:
    """0-1 knapsack over queries with integer CPU weights."""
    C = _cpu_budget(inst)
    grid = discretize(inst.cpu, C, resolution)
    check_cells(inst.num_queries * (grid.capacity + 1), "CPU knapsack")
    _, chosen = kernels.knapsack_01(grid.weights, inst.value.astype(float), int(grid.capacity))
    plan = plan_from_queries(inst, chosen)
    ev = evaluate_integral(inst, plan, Coupling.INEQUALITY)
    return plan, ev.with_guarantee(Guarantee(GuaranteeKind.EXACT, extras=grid.describe()))


def icls_fptas(inst: ProblemInstance, eps: float) -> tuple[IntegralPlan, PlanEvaluation]:
    """Value-scaling FPTAS: scale by eps*vmax/|Q|, then min-CPU DP over scaled value."""
    if not 0 < eps < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {eps!r}")
    C = _cpu_budget(inst)
    nq = inst.num_queries
    fits = inst.cpu <= C + FEAS_TOL
    vmax = float(inst.value[fits].max(initial=0.0))
    if vmax <= 0:
        plan = plan_from_queries(inst, np.zeros(nq, bool))
        ev = evaluate_integral(inst, plan, Coupling.INEQUALITY)
        return plan, ev.with_guarantee(Guarantee(GuaranteeKind.FPTAS, eps, 0.0))
    K = eps * vmax / nq
    scaled = np.where(fits, np.floor(inst.value / K), 0).astype(np.int64)
    V = int(scaled.sum())
    check_cells(nq * (V + 1), "FPTAS value table")
    min_cpu = np.full(V + 1, np.inf)
    min_cpu[0] = 0.0
    take = np.zeros((nq, V + 1), bool)
    for i in range(nq):
        s = int(scaled[i])
        if not fits[i] or s == 0:
            continue
        cand = min_cpu[: V + 1 - s] + inst.cpu[i]
        better = cand < min_cpu[s:]
        take[i, s:] = better
        min_cpu[s:] = np.where(better, cand, min_cpu[s:])
    reachable = np.flatnonzero(min_cpu <= C + FEAS_TOL)
    v = int(reachable.max())
    chosen = np.zeros(nq, bool)
    for i in range(nq - 1, -1, -1):
        if take[i, v]:
            chosen[i] = True
            v -= int(scaled[i])
    plan = plan_from_queries(inst, chosen)
    ev = evaluate_integral(inst, plan, Coupling.INEQUALITY)
    return plan, ev.with_guarantee(
        Guarantee(GuaranteeKind.FPTAS, eps, ev.expected_utility / (1 - eps), {"scale": K})
    )


def fcls_greedy(inst: ProblemInstance) -> tuple[FractionalPlan, PlanEvaluation]:
    """Fractional knapsack over queries in descending per-match value/cost order."""
    C = _cpu_budget(inst)
    order = sorted(
        range(inst.num_queries),
        key=lambda i: (-inst.queries[i].utility_weight / inst.queries[i].cpu_cost_per_match, i),
    )
    y = np.zeros(inst.num_queries)
    left = C
    for i in order:
        cost = inst.cpu[i]
        if cost <= left:
            y[i] = 1.0
            left -= cost
        else:
            y[i] = left / cost
            break
    plan = FractionalPlan.from_vectors(inst, np.ones(inst.num_types), y)
    ev = evaluate_fractional(inst, plan, Coupling.INEQUALITY)
    return plan, ev.with_guarantee(EXACT)
