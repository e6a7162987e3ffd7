import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cepshed.errors import (
    AllQueriesLinear,
    ComponentTooLarge,
    CouplingViolation,
    GridTooLarge,
    IncompatiblePlan,
    InputError,
    InstanceTooLarge,
    LatticeTooLarge,
    MissingBudget,
    NonIntegralBudget,
    NonPositiveBudget,
    QueryLargerThanBudget,
    UnknownEventType,
    UnsupportedVariant,
)
from cepshed.event_model import EventType, Query
from cepshed.planner import (
    Coupling,
    FractionalPlan,
    GuaranteeKind,
    IntegralPlan,
    ProblemInstance,
    Variant,
    brute_force_integral,
    evaluate_fractional,
    evaluate_integral,
    fcls_greedy,
    fmls_grid_search,
    fmls_normalize,
    full_keep_plan,
    grid_bound_factor,
    grid_size,
    icls_dp,
    icls_fptas,
    idls_2d_knapsack,
    idls_tricriteria,
    imls_bicriteria,
    imls_knapsack_greedy,
    imls_multitenant_dp,
    nonconcavity_witness,
    plan_from_events,
    plan_from_queries,
    random_instance,
)
from cepshed.planner.discretize import check_cells, discretize, pick_resolution
from cepshed.planner.exact import event_components
from cepshed.scenarios import cpu_instance, dual_instance, memory_instance, unit_alphabet

EXACT = 1e-12


# ---------------------------------------------------------------- oracles

def oracle_imls(inst):
    best = 0.0
    for bits in itertools.product([0, 1], repeat=inst.num_types):
        if math.fsum(w for w, b in zip(inst.event_weight, bits) if b) > inst.memory_budget + 1e-9:
            continue
        val = math.fsum(v for v, mem in zip(inst.value, inst.members) if all(bits[j] for j in mem))
        best = max(best, val)
    return best


def oracle_icls(inst):
    best = 0.0
    for bits in itertools.product([0, 1], repeat=inst.num_queries):
        if math.fsum(c for c, b in zip(inst.cpu, bits) if b) <= inst.cpu_budget + 1e-9:
            best = max(best, math.fsum(v for v, b in zip(inst.value, bits) if b))
    return best


def oracle_idls(inst):
    best = 0.0
    for bits in itertools.product([0, 1], repeat=inst.num_types):
        if math.fsum(w for w, b in zip(inst.event_weight, bits) if b) > inst.memory_budget + 1e-9:
            continue
        avail = [i for i, mem in enumerate(inst.members) if all(bits[j] for j in mem)]
        for r in range(len(avail) + 1):
            for qs in itertools.combinations(avail, r):
                if math.fsum(inst.cpu[i] for i in qs) <= inst.cpu_budget + 1e-9:
                    best = max(best, math.fsum(inst.value[i] for i in qs))
    return best


def small_instances(count, seed, **kw):
    rng = np.random.default_rng(seed)
    kw.setdefault("max_types", 7)
    kw.setdefault("max_queries", 5)
    return [random_instance(rng, **kw) for _ in range(count)]


# ---------------------------------------------------------------- model

def test_memory_instance_derived_quantities():
    inst = memory_instance()
    assert list(inst.event_weight) == [1.0] * 5
    assert list(inst.value) == [2.0, 4.0, 6.0]
    assert inst.members == ((0, 2), (2, 4), (0, 1, 2, 3))
    assert list(inst.query_weight) == [2.0, 2.0, 4.0]
    assert inst.p == 3 and inst.d == 4
    assert inst.f == pytest.approx(4 / 3)


def test_missing_expected_matches_uses_analytic_estimate():
    alpha = [EventType("A", 1, 1.0), EventType("B", 1, 1.0)]
    inst = ProblemInstance(alpha, [Query("q", ("A", "B"), 2.0)], 1.0)
    assert inst.value[0] == pytest.approx(1.0)


def test_instance_validation():
    with pytest.raises(NonPositiveBudget):
        ProblemInstance(unit_alphabet(), [], memory_budget=-1)
    with pytest.raises(InputError):
        ProblemInstance(unit_alphabet(), [Query("q", ("A",), 1.0, expected_matches=1)] * 2)
    with pytest.raises(UnknownEventType):
        ProblemInstance(unit_alphabet(), [Query("q", ("Z",), 1.0, expected_matches=1)])
    with pytest.raises(MissingBudget):
        memory_instance().require_cpu()
    assert memory_instance(0.0).f == math.inf
    assert ProblemInstance(unit_alphabet(), [], 3.0).f == 0.0


def test_repeated_type_counts_once_in_members_but_twice_in_positions():
    inst = ProblemInstance(unit_alphabet(), [Query("q", ("A", "B", "A"), 1.0, expected_matches=1)], 3.0)
    assert inst.members == ((0, 1),)
    assert sorted(inst.positions[0]) == [0, 0, 1]


def test_evaluate_integral_coupling_rules():
    inst = memory_instance()
    keep = dict.fromkeys("ABCDE", False) | {"A": True, "C": True}
    claims_q2 = IntegralPlan(keep, {"Q1": True, "Q2": True, "Q3": False})
    with pytest.raises(CouplingViolation):
        evaluate_integral(inst, claims_q2)
    silent = IntegralPlan(keep, {"Q1": False, "Q2": False, "Q3": False})
    assert evaluate_integral(inst, silent).expected_utility == 2.0
    assert evaluate_integral(inst, silent, Coupling.INEQUALITY).expected_utility == 0.0
    with pytest.raises(IncompatiblePlan):
        evaluate_integral(inst, IntegralPlan({"A": True}, {}))


def test_evaluate_fractional_product_uses_multiplicity():
    inst = ProblemInstance(unit_alphabet(), [Query("q", ("A", "B", "A"), 1.0, expected_matches=2)], 3.0)
    x = dict.fromkeys("ABCDE", 1.0) | {"A": 0.5, "B": 0.8}
    ev = evaluate_fractional(inst, FractionalPlan(x, {"q": 0.0}))
    assert ev.expected_utility == pytest.approx(2 * 0.25 * 0.8)
    with pytest.raises(CouplingViolation):
        evaluate_fractional(inst, FractionalPlan(x, {"q": 0.5}), Coupling.INEQUALITY)
    with pytest.raises(InputError):
        FractionalPlan({"A": 1.5}, {})


def test_uniform_sampling_of_memory_example():
    inst = memory_instance()
    x = dict.fromkeys("ABCDE", 0.6)
    ev = evaluate_fractional(inst, FractionalPlan(x, dict.fromkeys(("Q1", "Q2", "Q3"), 0.0)))
    assert ev.expected_utility == pytest.approx(2 * 0.36 + 4 * 0.36 + 6 * 0.6**4, abs=1e-12)
    assert ev.expected_utility == pytest.approx(2.9376, abs=1e-12)
    assert ev.memory_use == pytest.approx(3.0)


def test_greedy_picks_best_disjoint_queries():
    alpha = [EventType(n, 1.0, 1.0) for n in "ABC"]
    qs = [Query(f"q{n}", (n,), 1.0, w, expected_matches=1) for n, w in zip("ABC", (1.0, 3.0, 2.0))]
    plan, ev = imls_knapsack_greedy(ProblemInstance(alpha, qs, 2.0))
    assert set(plan.kept_queries) == {"qB", "qC"} and ev.expected_utility == 5.0


def test_plan_constructors():
    inst = memory_instance()
    p = plan_from_events(inst, [1, 0, 1, 0, 1])
    assert p.kept_queries == ("Q1", "Q2")
    q = plan_from_queries(inst, [0, 0, 1])
    assert q.kept_events == ("A", "B", "C", "D")
    assert evaluate_integral(inst, full_keep_plan(inst)).expected_utility == 12
    assert FractionalPlan.from_integral(p) == FractionalPlan.from_vectors(inst, [1, 0, 1, 0, 1], [1, 1, 0])


# ---------------------------------------------------------------- worked examples

def test_memory_example_optimum():
    plan, ev = brute_force_integral(memory_instance(), Variant.IMLS)
    assert plan.kept_events == ("A", "C", "E")
    assert ev.expected_utility == 6.0
    plan2, ev2 = imls_multitenant_dp(memory_instance())
    assert plan2 == plan and ev2.expected_utility == 6.0


def test_cpu_example_optimum():
    inst = cpu_instance()
    for solver in (icls_dp, lambda i: brute_force_integral(i, Variant.ICLS)):
        plan, ev = solver(inst)
        assert plan.kept_queries == ("Q2", "Q3")
        assert abs(10 * ev.expected_utility - 10.0) <= EXACT
    _, ev = fcls_greedy(inst)
    assert abs(10 * ev.expected_utility - 10.0) <= EXACT


def test_dual_example_optimum():
    plan, ev = brute_force_integral(dual_instance(), Variant.IDLS)
    assert plan.kept_events == ("A", "C", "E")
    assert plan.kept_queries == ("Q1", "Q2")
    assert abs(10 * ev.expected_utility - 6.0) <= EXACT


def test_greedy_refuses_oversized_query():
    with pytest.raises(QueryLargerThanBudget):
        imls_knapsack_greedy(memory_instance())


def test_two_dimensional_knapsack_on_dual_example_without_largest_query():
    _, ev = idls_2d_knapsack(dual_instance().without_queries(["Q3"]))
    assert ev.expected_utility == pytest.approx(0.4)


def test_bicriteria_reports_relaxation_loss():
    _, ev = imls_bicriteria(memory_instance(), 0.5)
    assert ev.guarantee.kind is GuaranteeKind.BICRITERIA
    assert ev.guarantee.extras["lp_loss"] == pytest.approx(4.8)


# ---------------------------------------------------------------- exact solvers vs oracles

@pytest.mark.parametrize("inst", small_instances(25, 1), ids=lambda _: "")
def test_brute_force_matches_oracles(inst):
    assert brute_force_integral(inst, Variant.IMLS)[1].expected_utility == pytest.approx(oracle_imls(inst), abs=1e-9)
    assert brute_force_integral(inst, Variant.ICLS)[1].expected_utility == pytest.approx(oracle_icls(inst), abs=1e-9)
    assert brute_force_integral(inst, Variant.IDLS)[1].expected_utility == pytest.approx(oracle_idls(inst), abs=1e-9)


@pytest.mark.parametrize("inst", small_instances(25, 2), ids=lambda _: "")
def test_exact_dps_match_oracles(inst):
    assert icls_dp(inst)[1].expected_utility == pytest.approx(oracle_icls(inst), abs=1e-9)
    if max(len(c) for c in event_components(inst)) <= 16:
        _, ev = imls_multitenant_dp(inst)
        assert ev.expected_utility == pytest.approx(oracle_imls(inst), abs=1e-9)
        assert ev.feasible_memory


def test_brute_force_limits():
    with pytest.raises(UnsupportedVariant):
        brute_force_integral(memory_instance(), Variant.FMLS)
    with pytest.raises(InstanceTooLarge):
        brute_force_integral(memory_instance(), Variant.IMLS, limit=3)
    with pytest.raises(MissingBudget):
        brute_force_integral(memory_instance(), Variant.ICLS)


def test_multitenant_component_limit():
    alpha = [EventType(f"E{j}", 1, 1) for j in range(6)]
    q = Query("q", tuple(f"E{j}" for j in range(6)), 1.0, expected_matches=1)
    with pytest.raises(ComponentTooLarge):
        imls_multitenant_dp(ProblemInstance(alpha, [q], 3.0), k_max=4)


# ---------------------------------------------------------------- approximation properties

seeds = st.integers(0, 2**31 - 1)


@given(seeds, st.sampled_from([0.25, 0.5, 0.75]))
def test_bicriteria_bounds(seed, tau):
    inst = small_instances(1, seed)[0]
    _, ev = imls_bicriteria(inst, tau)
    total = math.fsum(inst.value)
    assert total - ev.expected_utility <= (total - oracle_imls(inst)) / tau + 1e-9
    assert ev.memory_use <= inst.memory_budget / (1 - tau) + 1e-9


@given(seeds, st.sampled_from([0.25, 0.5, 0.75]))
def test_tricriteria_bounds(seed, tau):
    inst = small_instances(1, seed)[0]
    _, ev = idls_tricriteria(inst, tau)
    total = math.fsum(inst.value)
    assert total - ev.expected_utility <= (total - oracle_idls(inst)) / tau + 1e-9
    assert ev.memory_use <= inst.memory_budget / (1 - tau) + 1e-9
    assert ev.cpu_use <= inst.cpu_budget / (1 - tau) + 1e-9


def test_tau_must_be_open_unit_interval():
    for tau in (0.0, 1.0, -0.1):
        with pytest.raises(InputError):
            imls_bicriteria(memory_instance(), tau)
    with pytest.raises(NonPositiveBudget):
        idls_tricriteria(dual_instance(cpu_budget=0.0), 0.5)


@given(seeds)
def test_greedy_and_two_dimensional_ratios(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, 7, 5, min_memory=0)
    inst = inst.with_budgets(memory=max(inst.memory_budget, 1 + max(inst.query_weight)), cpu=inst.cpu_budget)
    ratio = (1 - inst.f) / inst.p
    _, ev = imls_knapsack_greedy(inst)
    assert ev.expected_utility >= ratio * oracle_imls(inst) - 1e-9
    assert ev.feasible_memory
    _, ev = idls_2d_knapsack(inst)
    assert ev.expected_utility >= ratio * oracle_idls(inst) - 1e-9
    assert ev.feasible


@given(seeds, st.sampled_from([0.5, 0.1, 0.01]))
def test_fptas_bound_and_feasibility(seed, eps):
    inst = small_instances(1, seed)[0]
    _, ev = icls_fptas(inst, eps)
    assert ev.expected_utility >= (1 - eps) * oracle_icls(inst) - 1e-9
    assert ev.feasible_cpu


@given(seeds)
def test_fcls_greedy_equals_fractional_knapsack(seed):
    inst = small_instances(1, seed)[0]
    _, ev = fcls_greedy(inst)
    # independent fractional-knapsack value via sorting by density with exact ties
    order = sorted(range(inst.num_queries), key=lambda i: -inst.value[i] / inst.cpu[i])
    room, best = inst.cpu_budget, 0.0
    for i in order:
        take = min(1.0, room / inst.cpu[i])
        best += take * inst.value[i]
        room -= take * inst.cpu[i]
        if room <= 0:
            break
    assert ev.expected_utility == pytest.approx(best, abs=1e-9)
    assert ev.cpu_use <= inst.cpu_budget + 1e-9


# ---------------------------------------------------------------- discretisation

def test_pick_resolution():
    assert pick_resolution(np.array([1.0, 2.0])) == 1
    assert pick_resolution(np.array([0.5, 1.5])) == 0.5
    assert pick_resolution(np.array([0.2, 0.4])) == 0.2
    assert pick_resolution(np.array([1 / 3])) == 1e-3


def test_discretize_rounds_conservatively():
    d = discretize(np.array([0.3, 0.7]), 1.0, resolution=0.25)
    assert list(d.weights) == [2, 3] and d.capacity == 4 and not d.exact
    with pytest.raises(NonIntegralBudget):
        discretize(np.array([0.3]), 1.0, resolution=0.25, require_exact=True)
    exact = discretize(np.array([0.2, 0.4]), 0.6)
    assert exact.exact and list(exact.weights) == [1, 2] and exact.capacity == 3
    with pytest.raises(LatticeTooLarge):
        check_cells(10**9, "test")


# ---------------------------------------------------------------- fractional memory

@pytest.mark.parametrize("k, d", [(8, 2), (4, 3), (32, 2), (5, 5)])
def test_grid_bound_factor_formula(k, d):
    assert grid_bound_factor(k, d) == pytest.approx(math.factorial(k) / math.factorial(k - d) / k**d)


def test_grid_size_is_binomial():
    assert grid_size(4, 8) == math.comb(11, 3)


def test_degenerate_budget_keeps_everything():
    inst = memory_instance(100.0)
    assert fmls_normalize(inst).degenerate
    plan, ev = fmls_grid_search(inst, 4)
    assert all(v == 1.0 for v in plan.sample_event.values())
    assert ev.guarantee.kind is GuaranteeKind.EXACT


def test_grid_search_respects_budget_and_refines():
    inst = memory_instance()
    prev = -1.0
    for k in (2, 4, 8, 16):
        plan, ev = fmls_grid_search(inst, k)
        assert ev.memory_use <= inst.memory_budget + 1e-9
        assert ev.expected_utility >= prev - 1e-12
        prev = ev.expected_utility
    with pytest.raises(GridTooLarge):
        fmls_grid_search(inst, 400, cap=1000)


def test_nonconcavity_witness_is_positive_and_needs_multi_event_query():
    w = nonconcavity_witness(memory_instance())
    assert w.curvature > 0
    linear = ProblemInstance(unit_alphabet(), [Query("q", ("A",), 1.0, expected_matches=1)], 1.0)
    with pytest.raises(AllQueriesLinear):
        nonconcavity_witness(linear)
