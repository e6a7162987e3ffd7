"""Approximation algorithms: LP rounding and knapsack heuristics."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..errors import InputError, LpFailure, NonPositiveBudget, QueryLargerThanBudget
from ..lp_solver import Constraint, LinearProgram, Relation, Sense, solve_lp
from .discretize import check_cells, discretize
from .model import (
    FEAS_TOL,
    Coupling,
    Guarantee,
    GuaranteeKind,
    IntegralPlan,
    PlanEvaluation,
    ProblemInstance,
    evaluate_integral,
    plan_from_queries,
)


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not 0 < tau < 1:
        raise InputError(f"tau must lie strictly between 0 and 1, got {tau!r}")
    return tau


def _loss_relaxation(inst: ProblemInstance, with_cpu: bool) -> tuple[np.ndarray, float]:
    """Solve the loss-minimisation LP; returns (drop fractions, LP loss).

    Variables are the keep fractions x_j followed by the drop fractions of
    the queries, all in [0, 1].
    """
    n, nq = inst.num_types, inst.num_queries
    objective = np.concatenate([np.zeros(n), inst.value])
    rows = [Constraint(np.concatenate([inst.event_weight, np.zeros(nq)]), Relation.LE, inst.memory_budget)]
    for i, mem in enumerate(inst.members):
        for j in mem:
            # drop_i >= 1 - x_j
            row = np.zeros(n + nq)
            row[j] = 1.0
            row[n + i] = 1.0
            rows.append(Constraint(row, Relation.GE, 1.0))
    if with_cpu:
        # sum cpu_i (1 - drop_i) <= C
        row = np.concatenate([np.zeros(n), -inst.cpu])
        rows.append(Constraint(row, Relation.LE, inst.cpu_budget - float(inst.cpu.sum())))
    lp = LinearProgram(tuple(objective), Sense.MIN, tuple(rows), tuple([(0.0, 1.0)] * (n + nq)))
    sol = solve_lp(lp)
    if not sol.optimal:
        raise LpFailure(f"LP relaxation is {sol.status.value}")
    return np.array(sol.values[n:]), sol.objective_value


def _positive_memory(inst: ProblemInstance) -> float:
    M = inst.require_memory()
    if M <= 0:
        raise NonPositiveBudget("the memory budget must be positive")
    return M


def imls_bicriteria(inst: ProblemInstance, tau: float) -> tuple[IntegralPlan, PlanEvaluation]:
    """Round the LP relaxation: keep every query whose drop fraction is <= tau.

    Loss is at most ``lp_loss / tau`` and memory at most ``M / (1 - tau)``.
    """
    tau = _check_tau(tau)
    M = _positive_memory(inst)
    drop, lp_loss = _loss_relaxation(inst, with_cpu=False)
    accepted = drop <= tau
    plan = plan_from_queries(inst, accepted)
    ev = evaluate_integral(inst, plan, Coupling.EQUALITY)
    plan = IntegralPlan(plan.keep_event, dict(zip(inst.query_names, _available(inst, plan))))
    return plan, ev.with_guarantee(
        Guarantee(
            GuaranteeKind.BICRITERIA, tau, lp_loss / tau,
            {"memory_bound": M / (1 - tau), "lp_loss": lp_loss},
        )
    )


def _available(inst: ProblemInstance, plan: IntegralPlan) -> list[bool]:
    keep = [plan.keep_event[t] for t in inst.type_names]
    return [all(keep[j] for j in mem) for mem in inst.members]


def idls_tricriteria(inst: ProblemInstance, tau: float) -> tuple[IntegralPlan, PlanEvaluation]:
    """Tri-criteria rounding for the dual-bound problem.

    Only the accepted queries are produced, so CPU stays within ``C / (1 - tau)``.
    """
    tau = _check_tau(tau)
    M = _positive_memory(inst)
    C = inst.require_cpu()
    if C <= 0:
        raise NonPositiveBudget("the CPU budget must be positive")
    drop, lp_loss = _loss_relaxation(inst, with_cpu=True)
    plan = plan_from_queries(inst, drop <= tau)
    ev = evaluate_integral(inst, plan, Coupling.INEQUALITY)
    return plan, ev.with_guarantee(
        Guarantee(
            GuaranteeKind.TRICRITERIA, tau, lp_loss / tau,
            {"memory_bound": M / (1 - tau), "cpu_bound": C / (1 - tau), "lp_loss": lp_loss},
        )
    )


def _check_f(inst: ProblemInstance) -> None:
    if not inst.f < 1:
        big = inst.query_names[int(np.argmax(inst.query_weight))] if inst.num_queries else "?"
        raise QueryLargerThanBudget(
            f"query {big!r} needs memory {inst.query_weight.max():g} >= budget {inst.memory_budget:g}"
        )


def _ratio(inst: ProblemInstance) -> float:
    return inst.p / (1 - inst.f)


def imls_knapsack_greedy(inst: ProblemInstance) -> tuple[IntegralPlan, PlanEvaluation]:
    """Pack queries by value per unit of memory, stopping at the first misfit.

    Each query weighs the full memory of its event types; the achieved
    utility times ``p / (1 - f)`` bounds the optimum from above.
    """
    M = _positive_memory(inst)
    _check_f(inst)
    order = sorted(range(inst.num_queries), key=lambda i: (-inst.value[i] / inst.query_weight[i], i))
    chosen = np.zeros(inst.num_queries, bool)
    used = 0.0
    for i in order:
        if used + inst.query_weight[i] > M + FEAS_TOL:
            break
        chosen[i] = True
        used += inst.query_weight[i]
    plan = plan_from_queries(inst, chosen)
    ev = evaluate_integral(inst, plan, Coupling.EQUALITY)
    plan = IntegralPlan(plan.keep_event, dict(zip(inst.query_names, _available(inst, plan))))
    ratio = _ratio(inst)
    return plan, ev.with_guarantee(
        Guarantee(GuaranteeKind.RATIO, ratio, ev.expected_utility * ratio, {"p": inst.p, "f": inst.f})
    )


def idls_2d_knapsack(
    inst: ProblemInstance, resolution: float | None = None
) -> tuple[IntegralPlan, PlanEvaluation]:
    """Exact 2-D 0-1 knapsack over queries (summed event memory, CPU).

    Summing event memory per query over-counts shared types, so the plan is
    feasible for the original problem and within ``p / (1 - f)`` of optimal.
    """
    M = _positive_memory(inst)
    C = inst.require_cpu()
    _check_f(inst)
    mem = discretize(inst.query_weight, M, resolution)
    cpu = discretize(inst.cpu, C, resolution)
    check_cells(max(inst.num_queries, 1) * (mem.capacity + 1) * (cpu.capacity + 1), "2-D knapsack")
    _, chosen = kernels.knapsack_2d(
        mem.weights, cpu.weights, inst.value.astype(float), int(mem.capacity), int(cpu.capacity)
    )
    plan = plan_from_queries(inst, chosen)
    ev = evaluate_integral(inst, plan, Coupling.INEQUALITY)
    ratio = _ratio(inst)
    return plan, ev.with_guarantee(
        Guarantee(
            GuaranteeKind.RATIO, ratio, ev.expected_utility * ratio,
            {"p": inst.p, "f": inst.f, "memory_grid": mem.describe(), "cpu_grid": cpu.describe()},
        )
    )
