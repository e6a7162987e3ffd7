"""Arrival-rate and match-rate estimation.

The analytic match rate assumes independent Poisson arrivals and counts the
matches that fall inside one window of length ``T(Q)``, divided by ``T(Q)``:

    n = (1/T) * C(L, |Q|) * prod_e prod_{k<m(e)} (l_e - k) / prod_{r<|Q|} (L - r)

with ``l_e = lambda_e * T``, ``L`` the sum of ``l_e`` over the distinct
pattern types and ``m(e)`` the multiplicity of ``e`` in the pattern.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import Enum

from .errors import InputError, NonPositiveSpan, UnknownEventType, UnsupportedSemantics
from .event_model import EventSequence, MatchSemantics, Query
from .matcher import count_matches


@dataclass(frozen=True)
class RateEstimate:
    per_type_rate: Mapping[str, float]
    observation_span: float

    def __post_init__(self) -> None:
        if not self.observation_span > 0:
            raise NonPositiveSpan(f"observation span must be > 0, got {self.observation_span!r}")
        if any(r < 0 for r in self.per_type_rate.values()):
            raise InputError("arrival rates must be nonnegative")

    def __getitem__(self, name: str) -> float:
        try:
            return self.per_type_rate[name]
        except KeyError:
            raise UnknownEventType(f"no rate for event type {name!r}") from None


class EstimationMethod(str, Enum):
    ANALYTIC = "analytic"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class MatchRateEstimate:
    per_query_rate: Mapping[str, float]
    method: EstimationMethod


def _rate_lookup(rates: RateEstimate | Mapping[str, float]) -> Mapping[str, float]:
    return rates.per_type_rate if isinstance(rates, RateEstimate) else rates


def estimate_rates(
    sample: EventSequence, span: float, types: Iterable[str] = ()
) -> RateEstimate:
    """Per-type arrival rates ``count / span``; ``types`` adds zero-count entries."""
    span = float(span)
    if not span > 0:
        raise NonPositiveSpan(f"span must be > 0, got {span!r}")
    if len(sample) >= 2 and sample.times[-1] - sample.times[0] > span:
        raise InputError(
            f"span {span!r} is shorter than the sample's extent "
            f"{sample.times[-1] - sample.times[0]!r}"
        )
    names = list(dict.fromkeys([*types, *sample.types]))
    return RateEstimate({name: sample.count_type(name) / span for name in names}, span)


def _falling(x: float, k: int) -> float:
    out = 1.0
    for r in range(k):
        out *= x - r
    return out


def expected_matches_analytic(
    query: Query,
    rates: RateEstimate | Mapping[str, float],
    semantics: MatchSemantics | str = MatchSemantics.ANY,
) -> float:
    """Expected matches per unit time under Poisson arrivals (any-match only).

    Returns 0 when ``L < |Q|`` or when some ``l_e - k`` factor is not positive.
    """
    if MatchSemantics.parse(semantics) is not MatchSemantics.ANY:
        raise UnsupportedSemantics("the analytic estimate is defined for skip-till-any-match only")
    lookup = _rate_lookup(rates)
    T = query.window
    n = len(query.pattern)
    expected: dict[str, float] = {}
    for name in query.event_types:
        if name not in lookup:
            raise UnknownEventType(f"no arrival rate for event type {name!r}")
        expected[name] = float(lookup[name]) * T
    L = math.fsum(expected.values())
    if L < n:
        return 0.0
    numerator = 1.0
    for name, m in query.multiplicities.items():
        for k in range(m):
            factor = expected[name] - k
            if factor <= 0:
                return 0.0
            numerator *= factor
    ordered_positions = _falling(L, n)
    binom = ordered_positions / math.factorial(n)
    return binom * numerator / ordered_positions / T


def expected_matches_empirical(
    sample: EventSequence,
    span: float,
    query: Query,
    semantics: MatchSemantics | str = MatchSemantics.ANY,
) -> float:
    """Observed matches (span <= window) per unit time of the sample."""
    span = float(span)
    if not span > 0:
        raise NonPositiveSpan(f"span must be > 0, got {span!r}")
    return count_matches(sample, query, semantics) / span


def estimate_match_rates(
    queries: Iterable[Query], rates: RateEstimate | Mapping[str, float]
) -> MatchRateEstimate:
    return MatchRateEstimate(
        {q.id: expected_matches_analytic(q, rates) for q in queries}, EstimationMethod.ANALYTIC
    )
