"""Problem instances, shedding plans and their evaluation."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Any

import numpy as np

from ..errors import (
    CouplingViolation,
    IncompatiblePlan,
    InputError,
    MissingBudget,
    NonPositiveBudget,
    UnknownEventType,
)
from ..estimation import expected_matches_analytic
from ..event_model import Alphabet, EventType, Query

FEAS_TOL = 1e-9


class Variant(str, Enum):
    IMLS = "imls"
    FMLS = "fmls"
    ICLS = "icls"
    FCLS = "fcls"
    IDLS = "idls"

    @property
    def uses_memory(self) -> bool:
        return self in (Variant.IMLS, Variant.FMLS, Variant.IDLS)

    @property
    def uses_cpu(self) -> bool:
        return self in (Variant.ICLS, Variant.FCLS, Variant.IDLS)


class Coupling(str, Enum):
    EQUALITY = "equality"  # a query is produced iff all its events are kept
    INEQUALITY = "inequality"  # a query may be produced only if its events are kept


class GuaranteeKind(str, Enum):
    EXACT = "exact"
    BICRITERIA = "bicriteria"
    TRICRITERIA = "tricriteria"
    RATIO = "ratio"
    FPTAS = "fptas"
    GRID_RELATIVE = "grid-relative"
    RELATIVE = "relative"
    HEURISTIC = "heuristic"


@dataclass(frozen=True)
class Guarantee:
    """What a solver promises about its plan.

    ``parameter`` is the algorithm's knob (tau, epsilon, k or the ratio) and
    ``bound`` a numeric certificate whose meaning depends on ``kind``.
    """

    kind: GuaranteeKind
    parameter: float | None = None
    bound: float | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)


class ProblemInstance:
    """Alphabet, queries with resolved match rates, and resource budgets.

    Queries lacking ``expected_matches`` get the analytic Poisson estimate from
    the alphabet's arrival rates. ``p``, ``f`` and ``d`` are computed once.
    """

    def __init__(
        self,
        alphabet: Alphabet | Iterable[EventType],
        queries: Iterable[Query],
        memory_budget: float | None = None,
        cpu_budget: float | None = None,
    ):
        self.alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
        rates = {t.id: t.arrival_rate for t in self.alphabet}
        resolved = []
        seen: set[str] = set()
        for q in queries:
            if q.id in seen:
                raise InputError(f"duplicate query id {q.id!r}")
            seen.add(q.id)
            for name in q.pattern:
                if name not in self.alphabet:
                    raise UnknownEventType(f"query {q.id!r} references unknown event type {name!r}")
            if q.expected_matches is None:
                q = q.with_expected_matches(expected_matches_analytic(q, rates))
            resolved.append(q)
        self.queries: tuple[Query, ...] = tuple(resolved)
        for label, budget in (("memory", memory_budget), ("cpu", cpu_budget)):
            if budget is None:
                continue
            if not math.isfinite(float(budget)):
                raise InputError(f"{label} budget must be finite, got {budget!r}")
            if float(budget) < 0:
                raise NonPositiveBudget(f"{label} budget must be >= 0, got {budget!r}")
        self.memory_budget = None if memory_budget is None else float(memory_budget)
        self.cpu_budget = None if cpu_budget is None else float(cpu_budget)

        n = len(self.alphabet)
        self.type_names = self.alphabet.names
        self.query_names = tuple(q.id for q in self.queries)
        self.event_weight = np.array([t.memory_rate for t in self.alphabet], float)
        self.value = np.array([q.expected_matches * q.utility_weight for q in self.queries], float)
        self.cpu = np.array([q.expected_matches * q.cpu_cost_per_match for q in self.queries], float)
        self.members: tuple[tuple[int, ...], ...] = tuple(
            tuple(self.alphabet.index(name) for name in q.event_types) for q in self.queries
        )
        self.positions: tuple[tuple[int, ...], ...] = tuple(
            tuple(self.alphabet.index(name) for name in q.pattern) for q in self.queries
        )
        self.incidence = np.zeros((len(self.queries), n), bool)
        for i, mem in enumerate(self.members):
            self.incidence[i, list(mem)] = True
        self.query_weight = self.incidence.astype(float) @ self.event_weight
        # type j is bit n-1-j, so smaller masks are lexicographically smaller keep-vectors
        self.query_masks = np.array(
            [sum(1 << (n - 1 - j) for j in mem) for mem in self.members], np.int64
        )
        self.p = int(self.incidence.sum(axis=0).max(initial=0)) or 1
        self.d = max((len(q) for q in self.queries), default=1)
        if self.memory_budget is None:
            self.f = math.nan
        elif not self.queries:
            self.f = 0.0
        elif self.memory_budget == 0:
            self.f = math.inf
        else:
            self.f = float(self.query_weight.max() / self.memory_budget)

    def __repr__(self) -> str:
        return (
            f"ProblemInstance(types={list(self.type_names)}, queries={list(self.query_names)}, "
            f"M={self.memory_budget}, C={self.cpu_budget})"
        )

    @property
    def num_types(self) -> int:
        return len(self.type_names)

    @property
    def num_queries(self) -> int:
        return len(self.queries)

    def require_memory(self) -> float:
        if self.memory_budget is None:
            raise MissingBudget("this solver needs a memory budget")
        return self.memory_budget

    def require_cpu(self) -> float:
        if self.cpu_budget is None:
            raise MissingBudget("this solver needs a CPU budget")
        return self.cpu_budget

    def with_budgets(self, memory: float | None = None, cpu: float | None = None) -> "ProblemInstance":
        return ProblemInstance(self.alphabet, self.queries, memory, cpu)

    def without_queries(self, ids: Iterable[str]) -> "ProblemInstance":
        drop = set(ids)
        return ProblemInstance(
            self.alphabet, [q for q in self.queries if q.id not in drop],
            self.memory_budget, self.cpu_budget,
        )

    def scaled_utilities(self, alpha: float) -> "ProblemInstance":
        queries = [
            Query(q.id, q.pattern, q.window, q.utility_weight * alpha, q.cpu_cost_per_match,
                  q.expected_matches)
            for q in self.queries
        ]
        return ProblemInstance(self.alphabet, queries, self.memory_budget, self.cpu_budget)


def _frozen(mapping: Mapping) -> Mapping:
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True, eq=False)
class IntegralPlan:
    keep_event: Mapping[str, bool]
    keep_query: Mapping[str, bool]

    def __post_init__(self) -> None:
        object.__setattr__(self, "keep_event", _frozen({k: bool(v) for k, v in self.keep_event.items()}))
        object.__setattr__(self, "keep_query", _frozen({k: bool(v) for k, v in self.keep_query.items()}))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, IntegralPlan)
            and dict(self.keep_event) == dict(other.keep_event)
            and dict(self.keep_query) == dict(other.keep_query)
        )

    @classmethod
    def from_vectors(cls, inst: ProblemInstance, x: Sequence, y: Sequence) -> "IntegralPlan":
        return cls(dict(zip(inst.type_names, map(bool, x))), dict(zip(inst.query_names, map(bool, y))))

    @property
    def kept_events(self) -> tuple[str, ...]:
        return tuple(k for k, v in self.keep_event.items() if v)

    @property
    def kept_queries(self) -> tuple[str, ...]:
        return tuple(k for k, v in self.keep_query.items() if v)


@dataclass(frozen=True, eq=False)
class FractionalPlan:
    sample_event: Mapping[str, float]
    sample_query: Mapping[str, float]

    def __post_init__(self) -> None:
        for label, mapping in (("event", self.sample_event), ("query", self.sample_query)):
            for k, v in mapping.items():
                v = float(v)
                if not (0.0 <= v <= 1.0):
                    raise InputError(f"{label} sampling rate for {k!r} must lie in [0, 1], got {v!r}")
        object.__setattr__(self, "sample_event", _frozen({k: float(v) for k, v in self.sample_event.items()}))
        object.__setattr__(self, "sample_query", _frozen({k: float(v) for k, v in self.sample_query.items()}))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FractionalPlan)
            and dict(self.sample_event) == dict(other.sample_event)
            and dict(self.sample_query) == dict(other.sample_query)
        )

    @classmethod
    def from_vectors(cls, inst: ProblemInstance, x: Sequence, y: Sequence) -> "FractionalPlan":
        return cls(
            dict(zip(inst.type_names, map(float, x))), dict(zip(inst.query_names, map(float, y)))
        )

    @classmethod
    def from_integral(cls, plan: IntegralPlan) -> "FractionalPlan":
        return cls(
            {k: float(v) for k, v in plan.keep_event.items()},
            {k: float(v) for k, v in plan.keep_query.items()},
        )


@dataclass(frozen=True)
class PlanEvaluation:
    expected_utility: float
    memory_use: float
    cpu_use: float
    feasible_memory: bool
    feasible_cpu: bool
    guarantee: Guarantee | None = None

    @property
    def feasible(self) -> bool:
        return self.feasible_memory and self.feasible_cpu

    def with_guarantee(self, guarantee: Guarantee) -> "PlanEvaluation":
        return PlanEvaluation(
            self.expected_utility, self.memory_use, self.cpu_use,
            self.feasible_memory, self.feasible_cpu, guarantee,
        )


def _vectors(inst: ProblemInstance, events: Mapping, queries: Mapping) -> tuple[np.ndarray, np.ndarray]:
    if set(events) != set(inst.type_names) or set(queries) != set(inst.query_names):
        raise IncompatiblePlan("plan keys do not match the instance's event types and queries")
    x = np.array([float(events[k]) for k in inst.type_names])
    y = np.array([float(queries[k]) for k in inst.query_names])
    return x, y


def _within(use: float, budget: float | None) -> bool:
    return budget is None or use <= budget + FEAS_TOL


def _evaluation(inst: ProblemInstance, x: np.ndarray, y: np.ndarray) -> PlanEvaluation:
    utility = math.fsum(inst.value * y)
    memory = math.fsum(inst.event_weight * x)
    cpu = math.fsum(inst.cpu * y)
    return PlanEvaluation(
        utility, memory, cpu, _within(memory, inst.memory_budget), _within(cpu, inst.cpu_budget)
    )


def evaluate_integral(
    inst: ProblemInstance, plan: IntegralPlan, coupling: Coupling | str = Coupling.EQUALITY
) -> PlanEvaluation:
    """Utility, memory and CPU of an all-or-nothing plan.

    Equality coupling derives every query's status from its events; a plan
    that claims a query whose events are dropped is rejected either way.
    """
    coupling = Coupling(coupling)
    x, y = _vectors(inst, plan.keep_event, plan.keep_query)
    available = np.array([all(x[j] for j in mem) for mem in inst.members], bool)
    bad = [inst.query_names[i] for i in np.flatnonzero((y > 0) & ~available)]
    if bad:
        raise CouplingViolation(f"queries {bad} are kept but some of their events are dropped")
    if coupling is Coupling.EQUALITY:
        y = available.astype(float)
    return _evaluation(inst, x, y)


def fractional_query_rates(inst: ProblemInstance, x: np.ndarray) -> np.ndarray:
    """Per-query survival probability: product of event rates over pattern positions."""
    out = np.empty(inst.num_queries)
    for i, pos in enumerate(inst.positions):
        prod = 1.0
        for j in pos:
            prod *= x[j]
        out[i] = prod
    return out


def evaluate_fractional(
    inst: ProblemInstance, plan: FractionalPlan, coupling: Coupling | str = Coupling.EQUALITY
) -> PlanEvaluation:
    coupling = Coupling(coupling)
    x, y = _vectors(inst, plan.sample_event, plan.sample_query)
    product = fractional_query_rates(inst, x)
    over = np.flatnonzero(y > product + FEAS_TOL)
    if coupling is Coupling.INEQUALITY and over.size:
        names = [inst.query_names[i] for i in over]
        raise CouplingViolation(f"query sampling rates of {names} exceed their events' product")
    if coupling is Coupling.EQUALITY:
        y = product
    return _evaluation(inst, x, y)


def full_keep_plan(inst: ProblemInstance) -> IntegralPlan:
    return IntegralPlan.from_vectors(inst, [True] * inst.num_types, [True] * inst.num_queries)


def plan_from_events(inst: ProblemInstance, keep: Sequence[bool]) -> IntegralPlan:
    """Keep the given event types and every query they fully support."""
    keep = [bool(k) for k in keep]
    y = [all(keep[j] for j in mem) for mem in inst.members]
    return IntegralPlan.from_vectors(inst, keep, y)


def plan_from_queries(inst: ProblemInstance, selected: Sequence[bool]) -> IntegralPlan:
    """Produce the given queries and keep exactly the union of their events."""
    selected = [bool(s) for s in selected]
    x = np.zeros(inst.num_types, bool)
    for i, s in enumerate(selected):
        if s:
            x[list(inst.members[i])] = True
    return IntegralPlan.from_vectors(inst, x, selected)
