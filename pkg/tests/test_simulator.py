import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cepshed.errors import IncompatiblePlan, InputError, UnknownEventType
from cepshed.event_model import EventType, Query
from cepshed.planner import FractionalPlan, IntegralPlan, ProblemInstance, full_keep_plan, plan_from_events
from cepshed.scenarios import memory_instance, running_queries, unit_alphabet
from cepshed.simulator import (
    SimulationConfig,
    adversarial_demo,
    apply_plan,
    generate_stream,
    simulate,
    window_match_rate_mc,
)


def test_stream_is_strictly_increasing_and_reproducible():
    a = generate_stream({"A": 3.0, "B": 1.0}, 200.0, seed=5)
    b = generate_stream({"A": 3.0, "B": 1.0}, 200.0, seed=5)
    assert np.array_equal(a.times, b.times) and np.array_equal(a.codes, b.codes)
    assert np.all(np.diff(a.times) > 0)
    assert a.times.min() >= 0 and a.times.max() < 200.0


def test_stream_counts_are_poisson():
    counts = [generate_stream({"A": 2.0}, 10.0, seed=s).count_type("A") for s in range(400)]
    mean = np.mean(counts)
    assert abs(mean - 20.0) <= 3 * math.sqrt(20.0 / 400)
    assert np.var(counts, ddof=1) == pytest.approx(20.0, rel=0.25)


def test_stream_rejects_bad_input():
    with pytest.raises(InputError):
        generate_stream({"A": 1.0}, 0.0)
    with pytest.raises(InputError):
        generate_stream({"A": -1.0}, 5.0)


def test_apply_plan_integral_and_fractional():
    s = generate_stream({"A": 5.0, "B": 5.0}, 100.0, seed=1)
    kept = apply_plan(s, IntegralPlan({"A": True, "B": False}, {}))
    assert set(kept.type_names()) == {"A"} and kept.count_type("A") == s.count_type("A")
    thin = apply_plan(s, FractionalPlan({"A": 0.5, "B": 1.0}, {}), seed=2)
    n = s.count_type("A")
    assert abs(thin.count_type("A") - n / 2) <= 4 * math.sqrt(n / 4)
    assert thin.count_type("B") == s.count_type("B")
    with pytest.raises(UnknownEventType):
        apply_plan(s, IntegralPlan({"A": True}, {}))


def _poisson_instance():
    alpha = [EventType(n, 1.0, 1.0) for n in "ABC"]
    qs = [Query("ab", ("A", "B"), 2.0, 1.0), Query("abc", ("A", "B", "C"), 3.0, 2.0)]
    return ProblemInstance(alpha, qs, memory_budget=10.0)


def test_full_keep_simulation_matches_analytic_utility():
    inst = _poisson_instance()
    rep = simulate(inst, full_keep_plan(inst), SimulationConfig(600.0, trials=20, seed=3))
    target = math.fsum(inst.value)
    assert abs(rep.mean_utility_per_unit_time - target) <= 3 * rep.utility_standard_error
    assert rep.trials_run == 20 and len(rep.per_trial_utility) == 20


def test_sliding_mode_counts_more_for_distinct_types():
    # sliding windows count every span-fitting match, |Q| times the per-window rate
    inst = _poisson_instance().without_queries(["abc"])
    rep = simulate(inst, full_keep_plan(inst), SimulationConfig(2000.0, trials=5, seed=4, window_mode="sliding"))
    assert rep.match_rate_per_query["ab"] == pytest.approx(2.0, rel=0.1)


def test_dropping_events_removes_their_queries():
    inst = _poisson_instance()
    plan = plan_from_events(inst, [True, True, False])
    rep = simulate(inst, plan, SimulationConfig(300.0, trials=3))
    assert rep.mean_matches_per_query["abc"] == 0.0
    assert rep.mean_matches_per_query["ab"] > 0


def test_fractional_plan_thins_to_planned_rate():
    inst = _poisson_instance().without_queries(["abc"])
    plan = FractionalPlan({"A": 0.5, "B": 1.0, "C": 0.0}, {"ab": 0.25})
    rep = simulate(inst, plan, SimulationConfig(4000.0, trials=10, seed=9))
    assert abs(rep.mean_utility_per_unit_time - 0.25) <= 3 * rep.utility_standard_error + 1e-12


def test_reports_are_bit_identical_across_runs():
    inst = _poisson_instance()
    cfg = SimulationConfig(200.0, trials=4, seed=42)
    assert simulate(inst, full_keep_plan(inst), cfg) == simulate(inst, full_keep_plan(inst), cfg)


def test_memory_occupancy_reported():
    inst = _poisson_instance()
    rep = simulate(inst, full_keep_plan(inst), SimulationConfig(500.0, trials=2, seed=1))
    # each type is held for its longest window: A,B for 3, C for 3 at rate 1
    assert rep.mean_memory_occupancy == pytest.approx(9.0, rel=0.15)
    assert rep.peak_memory_occupancy >= rep.mean_memory_occupancy


def test_config_validation():
    with pytest.raises(InputError):
        SimulationConfig(0.0)
    with pytest.raises(InputError):
        SimulationConfig(10.0, trials=0)
    with pytest.raises(InputError):
        SimulationConfig(10.0, window_mode="hopping")
    inst = _poisson_instance()
    with pytest.raises(InputError):
        simulate(inst, full_keep_plan(inst), SimulationConfig(1.0))
    with pytest.raises(IncompatiblePlan):
        simulate(inst, IntegralPlan({"A": True}, {}), SimulationConfig(10.0))


@given(st.floats(0.5, 2.0), st.floats(0.5, 2.0), st.floats(1.0, 3.0))
def test_window_monte_carlo_is_unbiased(la, lb, T):
    q = Query("q", ("A", "B"), T)
    mean, se = window_match_rate_mc(q, {"A": la, "B": lb}, 3000, seed=1)
    expected = la * lb * T / 2
    assert abs(mean - expected) <= 4 * se + 1e-12


def test_adversarial_demo():
    r = adversarial_demo(20, 100_000, seed=0)
    assert r.offline_mean_utility == 1.0
    assert abs(r.online_mean_utility - 0.05) <= 3 * r.online_standard_error
    assert r.ratio == pytest.approx(1 / 20, abs=0.005)
    with pytest.raises(InputError):
        adversarial_demo(1, 10)
    with pytest.raises(InputError):
        adversarial_demo(5, 0)


def test_analytic_estimate_underestimates_when_expected_events_are_scarce():
    # lambda*T = 0.5 < |Q| = 1: the estimate is 0 but arrivals still match
    alpha = [EventType("A", 1.0, 0.5)]
    inst = ProblemInstance(alpha, [Query("a", ("A",), 1.0)], 5.0)
    assert inst.value[0] == 0.0
    rep = simulate(inst, full_keep_plan(inst), SimulationConfig(2000.0, trials=5, seed=2))
    assert rep.match_rate_per_query["a"] == pytest.approx(0.5, rel=0.1)
