"""Strict JSON formats for workloads and plans.

Unknown fields are rejected. Floats are written with ``repr`` precision, so
``parse(emit(x)) == x`` holds for every canonical document.
"""

from __future__ import annotations

import json
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import IncompatiblePlan, ParseError
from .event_model import EventType, MatchSemantics, Query
from .planner.model import (
    FractionalPlan,
    Guarantee,
    GuaranteeKind,
    IntegralPlan,
    PlanEvaluation,
    ProblemInstance,
)

FORMAT_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class EventTypeSpec(_Strict):
    name: str = Field(min_length=1)
    arrival_rate: float = Field(gt=0)
    memory_cost: float = Field(gt=0)


class QuerySpec(_Strict):
    name: str = Field(min_length=1)
    pattern: list[str] = Field(min_length=1)
    window: float = Field(gt=0)
    utility_weight: float = Field(default=1.0, gt=0)
    cpu_cost_per_match: float = Field(default=1.0, gt=0)
    expected_matches: float | None = Field(default=None, ge=0)


class Budgets(_Strict):
    memory: float | None = Field(default=None, ge=0)
    cpu: float | None = Field(default=None, ge=0)


class WorkloadFile(_Strict):
    event_types: list[EventTypeSpec] = Field(default_factory=list)
    queries: list[QuerySpec] = Field(default_factory=list)
    budgets: Budgets = Field(default_factory=Budgets)
    semantics: Literal["any", "next", "contiguity"] = "any"

    @model_validator(mode="after")
    def _references(self) -> "WorkloadFile":
        names = [t.name for t in self.event_types]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ValueError(f"duplicate event type names {sorted(dup)}")
        qnames = [q.name for q in self.queries]
        dup = {n for n in qnames if qnames.count(n) > 1}
        if dup:
            raise ValueError(f"duplicate query names {sorted(dup)}")
        known = set(names)
        for q in self.queries:
            for t in q.pattern:
                if t not in known:
                    raise ValueError(f"query {q.name!r} references undeclared event type {t!r}")
        return self

    def instance(self) -> ProblemInstance:
        return ProblemInstance(
            [EventType(t.name, t.memory_cost, t.arrival_rate) for t in self.event_types],
            [
                Query(q.name, tuple(q.pattern), q.window, q.utility_weight, q.cpu_cost_per_match,
                      q.expected_matches)
                for q in self.queries
            ],
            self.budgets.memory,
            self.budgets.cpu,
        )

    @property
    def match_semantics(self) -> MatchSemantics:
        return MatchSemantics.parse(self.semantics)

    @classmethod
    def from_instance(cls, inst: ProblemInstance, semantics: str = "any") -> "WorkloadFile":
        return cls(
            event_types=[
                EventTypeSpec(name=t.id, arrival_rate=t.arrival_rate, memory_cost=t.memory_cost)
                for t in inst.alphabet
            ],
            queries=[
                QuerySpec(
                    name=q.id, pattern=list(q.pattern), window=q.window,
                    utility_weight=q.utility_weight, cpu_cost_per_match=q.cpu_cost_per_match,
                    expected_matches=q.expected_matches,
                )
                for q in inst.queries
            ],
            budgets=Budgets(memory=inst.memory_budget, cpu=inst.cpu_budget),
            semantics=semantics,
        )


class EvaluationSpec(_Strict):
    expected_utility: float
    memory_use: float
    cpu_use: float
    feasible_memory: bool
    feasible_cpu: bool


class GuaranteeSpec(_Strict):
    kind: Literal[tuple(k.value for k in GuaranteeKind)]  # type: ignore[valid-type]
    parameter: float | None = None
    bound: float | None = None
    extras: dict[str, Any] = Field(default_factory=dict)


class PlanFile(_Strict):
    format_version: int = FORMAT_VERSION
    tool_version: str
    variant: Literal["imls", "fmls", "icls", "fcls", "idls", "fdls-eval"]
    algorithm: str
    parameters: dict[str, float | int | None] = Field(default_factory=dict)
    keep_event: dict[str, bool] | None = None
    keep_query: dict[str, bool] | None = None
    sample_event: dict[str, float] | None = None
    sample_query: dict[str, float] | None = None
    evaluation: EvaluationSpec
    guarantee: GuaranteeSpec | None = None

    @model_validator(mode="after")
    def _one_kind(self) -> "PlanFile":
        integral = self.keep_event is not None and self.keep_query is not None
        fractional = self.sample_event is not None and self.sample_query is not None
        partial = {self.keep_event is None, self.keep_query is None} == {True, False} or {
            self.sample_event is None, self.sample_query is None} == {True, False}
        if integral == fractional or partial:
            raise ValueError("a plan needs exactly one of keep_event/keep_query or sample_event/sample_query")
        return self

    @property
    def is_integral(self) -> bool:
        return self.keep_event is not None

    def plan(self) -> IntegralPlan | FractionalPlan:
        if self.is_integral:
            return IntegralPlan(self.keep_event, self.keep_query)
        return FractionalPlan(self.sample_event, self.sample_query)

    def stated_evaluation(self) -> PlanEvaluation:
        g = self.guarantee
        return PlanEvaluation(
            **self.evaluation.model_dump(),
            guarantee=None if g is None else Guarantee(GuaranteeKind(g.kind), g.parameter, g.bound, g.extras),
        )

    def check_compatible(self, inst: ProblemInstance) -> None:
        events = self.keep_event if self.is_integral else self.sample_event
        queries = self.keep_query if self.is_integral else self.sample_query
        if set(events) != set(inst.type_names) or set(queries) != set(inst.query_names):
            raise IncompatiblePlan("plan event types or queries differ from the workload's")


def _describe(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        parts.append(f"{loc}: {e['msg']}")
    return "; ".join(parts)


def _parse(model: type[BaseModel], text: str, source: str):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        raise ParseError(f"{source}: {_describe(exc)}") from None


def parse_workload(text: str, source: str = "<workload>") -> WorkloadFile:
    return _parse(WorkloadFile, text, source)


def parse_plan(text: str, source: str = "<plan>") -> PlanFile:
    return _parse(PlanFile, text, source)


def emit(doc: BaseModel) -> str:
    return json.dumps(doc.model_dump(mode="json"), indent=2, allow_nan=False) + "\n"


def load_workload(path: str) -> WorkloadFile:
    with open(path, encoding="utf-8") as fh:
        return parse_workload(fh.read(), path)


def load_plan(path: str) -> PlanFile:
    with open(path, encoding="utf-8") as fh:
        return parse_plan(fh.read(), path)
