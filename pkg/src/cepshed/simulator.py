"""Poisson stream simulation of shedding plans, and the online-vs-offline demo.

By default matches are counted inside back-to-back windows of length T(Q)
(``window_mode="tumbling"``), which is the quantity the analytic match rate
predicts. ``"sliding"`` counts every match whose span fits the window.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompatiblePlan, InputError, UnknownEventType
from .estimation import RateEstimate
from .event_model import EventSequence, MatchSemantics
from .matcher import count_matches, count_windowed_matches
from .planner.model import FractionalPlan, IntegralPlan, ProblemInstance

WINDOW_MODES = ("tumbling", "sliding")


@dataclass(frozen=True)
class SimulationConfig:
    duration: float
    trials: int = 1
    seed: int = 0
    semantics: MatchSemantics = MatchSemantics.ANY
    window_mode: str = "tumbling"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise InputError(f"duration must be > 0, got {self.duration!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise InputError(f"trials must be a positive integer, got {self.trials!r}")
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "semantics", MatchSemantics.parse(self.semantics))
        if self.window_mode not in WINDOW_MODES:
            raise InputError(f"window_mode must be one of {WINDOW_MODES}, got {self.window_mode!r}")


@dataclass(frozen=True)
class SimulationReport:
    mean_utility_per_unit_time: float
    utility_standard_error: float
    mean_matches_per_query: Mapping[str, float]
    match_rate_per_query: Mapping[str, float]
    peak_memory_occupancy: float
    mean_memory_occupancy: float
    cpu_consumed_per_unit_time: float
    trials_run: int
    window_mode: str = "tumbling"
    per_trial_utility: tuple[float, ...] = field(default=(), repr=False)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(int(seed))


def generate_stream(
    rates: RateEstimate | Mapping[str, float], duration: float, seed=0
) -> EventSequence:
    """Merge independent Poisson processes on ``[0, duration)``.

    Each type gets a Poisson count and uniform arrival times, which is the
    same law as exponential gaps. Equal timestamps are pushed apart by one ulp.
    """
    if not duration > 0:
        raise InputError(f"duration must be > 0, got {duration!r}")
    lookup = rates.per_type_rate if isinstance(rates, RateEstimate) else rates
    names = list(lookup)
    rng = _rng(seed)
    codes, times = [], []
    for code, name in enumerate(names):
        lam = float(lookup[name])
        if lam < 0:
            raise InputError(f"arrival rate of {name!r} is negative")
        k = int(rng.poisson(lam * duration)) if lam > 0 else 0
        times.append(rng.uniform(0.0, duration, size=k))
        codes.append(np.full(k, code, np.int64))
    t = np.concatenate(times) if times else np.empty(0)
    c = np.concatenate(codes) if codes else np.empty(0, np.int64)
    order = np.argsort(t, kind="stable")
    t, c = t[order], c[order]
    for k in range(1, t.shape[0]):
        if t[k] <= t[k - 1]:
            t[k] = np.nextafter(t[k - 1], np.inf)
    return EventSequence(names, c, t)


def _keep_mask(stream: EventSequence, keep: Mapping[str, float]) -> np.ndarray:
    for name in stream.types:
        if name not in keep:
            raise UnknownEventType(f"plan has no decision for event type {name!r}")
    per_code = np.array([float(keep[name]) for name in stream.types])
    return per_code[stream.codes] if len(stream) else np.empty(0)


def apply_plan(stream: EventSequence, plan: IntegralPlan | FractionalPlan, seed=0) -> EventSequence:
    """Drop shed types (integral) or thin each type independently (fractional)."""
    if isinstance(plan, IntegralPlan):
        return stream.filter(_keep_mask(stream, plan.keep_event) > 0)
    prob = _keep_mask(stream, plan.sample_event)
    u = _rng(seed).random(len(stream))
    return stream.filter(u < prob)


def _plan_vectors(inst: ProblemInstance, plan) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(plan, IntegralPlan):
        events, queries = plan.keep_event, plan.keep_query
    elif isinstance(plan, FractionalPlan):
        events, queries = plan.sample_event, plan.sample_query
    else:
        raise IncompatiblePlan(f"unsupported plan object {type(plan).__name__}")
    if set(events) != set(inst.type_names) or set(queries) != set(inst.query_names):
        raise IncompatiblePlan("plan keys do not match the instance's event types and queries")
    x = np.array([float(events[t]) for t in inst.type_names])
    y = np.array([float(queries[q]) for q in inst.query_names])
    return x, y


def _horizons(inst: ProblemInstance) -> np.ndarray:
    h = np.zeros(inst.num_types)
    for q, mem in zip(inst.queries, inst.members):
        for j in mem:
            h[j] = max(h[j], q.window)
    return h


def _occupancy(stream: EventSequence, inst: ProblemInstance, horizon: np.ndarray, duration: float):
    """(peak, time-average) memory held by retained events over ``[0, duration)``."""
    if not len(stream):
        return 0.0, 0.0
    idx = np.array([inst.alphabet.index(name) for name in stream.types])[stream.codes]
    size = np.array([t.memory_cost for t in inst.alphabet])[idx]
    hold = horizon[idx]
    live = hold > 0
    start, end, size = stream.times[live], (stream.times + hold)[live], size[live]
    if start.size == 0:
        return 0.0, 0.0
    t = np.concatenate([start, end])
    delta = np.concatenate([size, -size])
    # releases sort before arrivals at the same instant (half-open intervals)
    order = np.lexsort((delta, t))
    peak = float(np.cumsum(delta[order]).max())
    average = math.fsum(size * (np.minimum(end, duration) - start)) / duration
    return max(peak, 0.0), average


def simulate(inst: ProblemInstance, plan: IntegralPlan | FractionalPlan, config: SimulationConfig) -> SimulationReport:
    """Run ``config.trials`` independent Poisson trials of ``plan`` on ``inst``.

    Trial ``t`` draws from ``SeedSequence([seed, t])``, so reports are
    reproducible bit for bit. Produced matches of query i are thinned with
    probability ``y_i / prod x_j`` so that their rate follows the plan.
    """
    x, y = _plan_vectors(inst, plan)
    integral = isinstance(plan, IntegralPlan)
    rates = {t.id: t.arrival_rate for t in inst.alphabet}
    horizon = _horizons(inst)
    D = config.duration
    spans = []
    for q in inst.queries:
        if config.window_mode == "tumbling":
            windows = math.floor(D / q.window)
            if windows < 1:
                raise InputError(f"duration {D} is shorter than the window of query {q.id!r}")
            spans.append(windows * q.window)
        else:
            spans.append(D)
    survive = np.ones(inst.num_queries)
    for i, pos in enumerate(inst.positions):
        for j in pos:
            survive[i] *= x[j]
    thin = np.where(survive > 0, np.minimum(y / np.where(survive > 0, survive, 1.0), 1.0), 0.0)

    utilities, cpus, peaks, averages = [], [], [], []
    counts = np.zeros((config.trials, inst.num_queries))
    for trial in range(config.trials):
        s_stream, s_shed, s_out = np.random.SeedSequence([config.seed, trial]).spawn(3)
        stream = generate_stream(rates, D, s_stream)
        kept = apply_plan(stream, plan, s_shed)
        out_rng = np.random.default_rng(s_out)
        u_terms, c_terms = [], []
        for i, q in enumerate(inst.queries):
            if y[i] <= 0:
                continue
            if config.window_mode == "tumbling":
                sub = kept.filter(kept.times < spans[i])
                c = count_windowed_matches(sub, q, config.semantics)
            else:
                c = count_matches(kept, q, config.semantics)
            if not integral and thin[i] < 1.0:
                c = int(out_rng.binomial(c, thin[i]))
            counts[trial, i] = c
            u_terms.append(q.utility_weight * c / spans[i])
            c_terms.append(q.cpu_cost_per_match * c / spans[i])
        utilities.append(math.fsum(u_terms))
        cpus.append(math.fsum(c_terms))
        peak, avg = _occupancy(kept, inst, horizon, D)
        peaks.append(peak)
        averages.append(avg)

    n = config.trials
    mean_u = math.fsum(utilities) / n
    se = 0.0
    if n > 1:
        var = math.fsum((u - mean_u) ** 2 for u in utilities) / (n - 1)
        se = math.sqrt(var / n)
    mean_counts = {q: math.fsum(counts[:, i]) / n for i, q in enumerate(inst.query_names)}
    rates_out = {q: mean_counts[q] / spans[i] for i, q in enumerate(inst.query_names)}
    return SimulationReport(
        mean_u, se, mean_counts, rates_out,
        max(peaks), math.fsum(averages) / n, math.fsum(cpus) / n, n,
        config.window_mode, tuple(utilities),
    )


def window_match_rate_mc(query, rates: Mapping[str, float], windows: int, seed=0) -> tuple[float, float]:
    """Monte Carlo matches per unit time over ``windows`` independent windows.

    Returns (mean rate, standard error); windows are simulated back to back
    and counted separately.
    """
    T = query.window
    stream = generate_stream({t: rates[t] for t in query.event_types}, windows * T, seed)
    per_window = np.zeros(windows)
    seg = np.floor(stream.times / T).astype(np.int64)
    for w in np.unique(seg):
        piece = stream.filter(seg == w)
        per_window[w] = count_matches(piece, query)
    mean = float(per_window.mean()) / T
    se = float(per_window.std(ddof=1)) / math.sqrt(windows) / T if windows > 1 else 0.0
    return mean, se


@dataclass(frozen=True)
class AdversarialResult:
    m: int
    trials: int
    offline_mean_utility: float
    online_mean_utility: float
    online_standard_error: float

    @property
    def ratio(self) -> float:
        return self.online_mean_utility / self.offline_mean_utility if self.offline_mean_utility else math.nan


def adversarial_demo(m: int, trials: int, seed: int = 0) -> AdversarialResult:
    """Streams ``e_1..e_m, X`` over 3m types with room for two events.

    Type codes: ``E_i`` is i, ``E'_i`` is m+i, ``E''_i`` is 2m+i. Each e_i is
    E_i or E'_i with equal odds, X is uniform over the E''. The offline
    policy stores the e matching X; the online policy stores a uniformly
    chosen e before X arrives. Utility is 1 when the stored pair matches one
    of the 2m queries SEQ(E_i, E''_i), SEQ(E'_i, E''_i).
    """
    if int(m) != m or m < 2:
        raise InputError(f"m must be an integer >= 2, got {m!r}")
    if int(trials) != trials or trials < 1:
        raise InputError(f"trials must be a positive integer, got {trials!r}")
    m, trials = int(m), int(trials)
    matches = np.zeros((3 * m, 3 * m), bool)
    for i in range(m):
        matches[i, 2 * m + i] = True
        matches[m + i, 2 * m + i] = True
    rng = np.random.default_rng(seed)
    primed = rng.integers(0, 2, size=(trials, m))
    e_codes = np.arange(m) + m * primed
    x = rng.integers(0, m, size=trials)
    x_code = 2 * m + x
    rows = np.arange(trials)
    offline = matches[e_codes[rows, x], x_code].astype(float)
    stored = rng.integers(0, m, size=trials)
    online = matches[e_codes[rows, stored], x_code].astype(float)
    se = float(online.std(ddof=1)) / math.sqrt(trials) if trials > 1 else 0.0
    return AdversarialResult(m, trials, float(offline.mean()), float(online.mean()), se)
