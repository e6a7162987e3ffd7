"""Checks of every solver against brute-force oracles and its stated bound."""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .lp_solver import LinearProgram, Relation, Sense, solve_lp
from .planner import (
    ProblemInstance,
    Variant,
    brute_force_integral,
    fcls_greedy,
    fmls_grid_search,
    grid_size,
    icls_dp,
    icls_fptas,
    idls_2d_knapsack,
    idls_tricriteria,
    imls_bicriteria,
    imls_knapsack_greedy,
    imls_multitenant_dp,
    nonconcavity_witness,
    random_instance,
)
from .planner.exact import event_components

TOL = 1e-9
DEFAULT_TAUS = (0.25, 0.5, 0.75)
DEFAULT_EPS = (0.1, 0.01)
DEFAULT_KS = (2, 4, 8)
GRID_CHECK_LIMIT = 300_000


@dataclass(frozen=True)
class Check:
    """One bound check. ``margin`` is how far inside the bound the result is
    (negative means violated)."""

    instance: str
    name: str
    margin: float

    @property
    def passed(self) -> bool:
        return self.margin >= -TOL


def _rel(x: float, scale: float) -> float:
    return x / max(1.0, abs(scale))


def fcls_lp_optimum(inst: ProblemInstance) -> float:
    nq = inst.num_queries
    lp = LinearProgram(
        tuple(inst.value), Sense.MAX,
        ((tuple(inst.cpu), Relation.LE, inst.cpu_budget),),
        tuple([(0.0, 1.0)] * nq),
    )
    return solve_lp(lp).objective_value


def check_instance(
    inst: ProblemInstance,
    label: str,
    taus: Sequence[float] = DEFAULT_TAUS,
    eps_list: Sequence[float] = DEFAULT_EPS,
    ks: Sequence[int] = DEFAULT_KS,
) -> Iterator[Check]:
    """Yield every applicable check for ``inst`` (both budgets required)."""
    total = math.fsum(inst.value)
    M, C = inst.memory_budget, inst.cpu_budget
    _, imls_opt = brute_force_integral(inst, Variant.IMLS)
    _, idls_opt = brute_force_integral(inst, Variant.IDLS)
    _, icls_opt = brute_force_integral(inst, Variant.ICLS)
    imls_loss = total - imls_opt.expected_utility
    idls_loss = total - idls_opt.expected_utility

    for tau in taus:
        _, ev = imls_bicriteria(inst, tau)
        loss = total - ev.expected_utility
        yield Check(label, f"imls_bicriteria[tau={tau}].loss", _rel(imls_loss / tau - loss, total))
        yield Check(label, f"imls_bicriteria[tau={tau}].memory", _rel(M / (1 - tau) - ev.memory_use, M))
        _, ev = idls_tricriteria(inst, tau)
        loss = total - ev.expected_utility
        yield Check(label, f"idls_tricriteria[tau={tau}].loss", _rel(idls_loss / tau - loss, total))
        yield Check(label, f"idls_tricriteria[tau={tau}].memory", _rel(M / (1 - tau) - ev.memory_use, M))
        yield Check(label, f"idls_tricriteria[tau={tau}].cpu", _rel(C / (1 - tau) - ev.cpu_use, C))

    if inst.f < 1:
        ratio = (1 - inst.f) / inst.p
        _, ev = imls_knapsack_greedy(inst)
        yield Check(label, "imls_knapsack_greedy.ratio",
                    _rel(ev.expected_utility - ratio * imls_opt.expected_utility, total))
        yield Check(label, "imls_knapsack_greedy.memory", _rel(M - ev.memory_use, M))
        _, ev = idls_2d_knapsack(inst)
        yield Check(label, "idls_2d_knapsack.ratio",
                    _rel(ev.expected_utility - ratio * idls_opt.expected_utility, total))
        yield Check(label, "idls_2d_knapsack.budgets",
                    min(_rel(M - ev.memory_use, M), _rel(C - ev.cpu_use, C)))

    for eps in eps_list:
        _, ev = icls_fptas(inst, eps)
        yield Check(label, f"icls_fptas[eps={eps}]",
                    _rel(ev.expected_utility - (1 - eps) * icls_opt.expected_utility, total))

    _, ev = icls_dp(inst)
    yield Check(label, "icls_dp==brute", -abs(ev.expected_utility - icls_opt.expected_utility))
    if max(len(c) for c in event_components(inst)) <= 16:
        _, ev = imls_multitenant_dp(inst)
        yield Check(label, "imls_multitenant_dp==brute", -abs(ev.expected_utility - imls_opt.expected_utility))
    _, ev = fcls_greedy(inst)
    yield Check(label, "fcls_greedy==lp", -abs(ev.expected_utility - fcls_lp_optimum(inst)))

    if any(len(q) >= 2 for q in inst.queries):
        yield Check(label, "nonconcavity_witness", nonconcavity_witness(inst).curvature)

    if grid_size(inst.num_types, 2 * max(ks)) <= GRID_CHECK_LIMIT:
        values = {k: fmls_grid_search(inst, k)[1].expected_utility for k in sorted({*ks, *(2 * k for k in ks)})}
        for k in ks:
            yield Check(label, f"fmls_grid_nesting[k={k}]", values[2 * k] - values[k])


def random_suite(count: int, seed: int, max_types: int = 10, max_queries: int = 8) -> Iterator[tuple[str, ProblemInstance]]:
    rng = np.random.default_rng(seed)
    for t in range(count):
        yield f"random-{t}", random_instance(rng, max_types=max_types, max_queries=max_queries)


def run_checks(
    instances: Iterable[tuple[str, ProblemInstance]],
    taus: Sequence[float] = DEFAULT_TAUS,
    eps_list: Sequence[float] = DEFAULT_EPS,
    ks: Sequence[int] = DEFAULT_KS,
) -> list[Check]:
    out: list[Check] = []
    for label, inst in instances:
        out.extend(check_instance(inst, label, taus, eps_list, ks))
    return out


def example_checks() -> list[Check]:
    """The running example's memory, CPU and dual optima (utilities per 10 time units)."""
    from .scenarios import cpu_instance, dual_instance, memory_instance

    checks = []
    _, ev = brute_force_integral(memory_instance(), Variant.IMLS)
    checks.append(Check("example-memory", "utility==6", -abs(ev.expected_utility - 6.0)))
    _, ev = imls_multitenant_dp(memory_instance())
    checks.append(Check("example-memory", "multitenant utility==6", -abs(ev.expected_utility - 6.0)))
    _, ev = icls_dp(cpu_instance())
    checks.append(Check("example-cpu", "utility==10", -abs(10 * ev.expected_utility - 10.0)))
    _, ev = brute_force_integral(dual_instance(), Variant.IDLS)
    checks.append(Check("example-dual", "utility==6", -abs(10 * ev.expected_utility - 6.0)))
    return checks
