"""The running five-type example: stream, queries and planning instances.

Types A..E arrive once per time unit in a repeating cycle; three queries
SEQ(A,C), SEQ(C,E), SEQ(A,B,C,D) with window 5 and weights 1, 2, 3.
"""

from __future__ import annotations

from .event_model import EventSequence, EventType, Query, sequence_from_string
from .planner.model import ProblemInstance

TYPES = ("A", "B", "C", "D", "E")
PATTERNS = {"Q1": ("A", "C"), "Q2": ("C", "E"), "Q3": ("A", "B", "C", "D")}
WEIGHTS = {"Q1": 1.0, "Q2": 2.0, "Q3": 3.0}
WINDOW = 5.0


def running_stream() -> EventSequence:
    return sequence_from_string("A1 B2 C3 D4 E5 A6 B7 C8 D9 E10")


def running_queries(expected_matches: float | None = None, cpu_cost: float = 1.0) -> list[Query]:
    return [
        Query(qid, pattern, WINDOW, WEIGHTS[qid], cpu_cost, expected_matches)
        for qid, pattern in PATTERNS.items()
    ]


def unit_alphabet() -> list[EventType]:
    return [EventType(t, memory_cost=1.0, arrival_rate=1.0) for t in TYPES]


def memory_instance(memory_budget: float = 3.0) -> ProblemInstance:
    """Unit memory per type; two matches of each query over the stream."""
    return ProblemInstance(unit_alphabet(), running_queries(2.0), memory_budget=memory_budget)


def cpu_instance(cpu_budget: float = 0.4) -> ProblemInstance:
    """One CPU unit per match at 0.2 matches per time unit."""
    return ProblemInstance(unit_alphabet(), running_queries(0.2), cpu_budget=cpu_budget)


def dual_instance(memory_budget: float = 3.0, cpu_budget: float = 0.4) -> ProblemInstance:
    return ProblemInstance(unit_alphabet(), running_queries(0.2), memory_budget, cpu_budget)
