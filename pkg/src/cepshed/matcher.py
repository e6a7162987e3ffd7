"""Query-match enumeration, counting and utility under the three join semantics."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CountOverflow, UnknownEventType
from .event_model import Alphabet, EventSequence, MatchSemantics, Query


@dataclass(frozen=True)
class QueryMatch:
    query_id: str
    indices: tuple[int, ...]
    span: float


@dataclass(frozen=True)
class UtilityReport:
    per_query_counts: Mapping[str, int]
    per_query_utility: Mapping[str, float]
    total_utility: float = field(default=0.0)


def _check_alphabet(query: Query, alphabet: Alphabet | Iterable[str] | None) -> None:
    if alphabet is None:
        return
    known = alphabet if isinstance(alphabet, Alphabet) else set(alphabet)
    for name in query.pattern:
        if name not in known:
            raise UnknownEventType(f"query {query.id!r} references unknown event type {name!r}")


def _local_arrays(seq: EventSequence, query: Query):
    """Map the sequence onto pattern-local codes (-1 for foreign types).

    Returns None when some pattern type never occurs in ``seq``.
    """
    distinct = query.event_types
    local = np.full(len(seq.types), -1, np.int64)
    for k, name in enumerate(distinct):
        code = seq.code_of(name)
        if code < 0:
            return None
        local[code] = k
    codes = local[seq.codes] if len(seq) else np.empty(0, np.int64)
    pattern = np.array([distinct.index(name) for name in query.pattern], np.int64)
    return codes, pattern


def tumbling_segments(times: np.ndarray, width: float, origin: float = 0.0) -> np.ndarray:
    """Index of the window ``[origin + k*width, origin + (k+1)*width)`` of each time."""
    return np.floor((np.asarray(times, np.float64) - origin) / width).astype(np.int64)


def _count(
    seq: EventSequence,
    query: Query,
    semantics: MatchSemantics,
    segments: np.ndarray | None,
    backend=None,
) -> int:
    k = backend or kernels
    mapped = _local_arrays(seq, query)
    if mapped is None:
        return 0
    codes, pattern = mapped
    times = seq.times
    if segments is None:
        segments = np.zeros(len(seq), np.int64)
    if semantics is MatchSemantics.CONTIGUITY:
        return int(k.count_contiguous(codes, times, segments, pattern, query.window))
    # foreign types never block a match under the other two semantics
    keep = codes >= 0
    codes, times, segments = codes[keep], times[keep], segments[keep]
    if semantics is MatchSemantics.NEXT:
        return int(k.count_next(codes, times, segments, pattern, query.window))
    total, overflow = k.count_any(codes, times, segments, pattern, query.window)
    if overflow:
        raise CountOverflow(f"match count of query {query.id!r} exceeds 64-bit range")
    return int(total)


def count_matches(
    seq: EventSequence,
    query: Query,
    semantics: MatchSemantics | str = MatchSemantics.ANY,
    alphabet: Alphabet | Iterable[str] | None = None,
) -> int:
    """Number of distinct matches of ``query`` in ``seq`` (span <= window).

    Counts with a per-start dynamic program and never materialises matches.
    """
    semantics = MatchSemantics.parse(semantics)
    _check_alphabet(query, alphabet)
    return _count(seq, query, semantics, None)


def count_windowed_matches(
    seq: EventSequence,
    query: Query,
    semantics: MatchSemantics | str = MatchSemantics.ANY,
    origin: float = 0.0,
) -> int:
    """Matches lying entirely inside one tumbling window of length ``query.window``.

    This is the per-window sampling count whose expectation, divided by the
    window length, is the analytic match rate in :mod:`cepshed.estimation`.
    """
    semantics = MatchSemantics.parse(semantics)
    segments = tumbling_segments(seq.times, query.window, origin)
    return _count(seq, query, semantics, segments)


def enumerate_matches(
    seq: EventSequence,
    query: Query,
    semantics: MatchSemantics | str = MatchSemantics.ANY,
    alphabet: Alphabet | Iterable[str] | None = None,
) -> list[QueryMatch]:
    """All matches as index tuples, in lexicographic order. Exponential; for tests."""
    semantics = MatchSemantics.parse(semantics)
    _check_alphabet(query, alphabet)
    names = seq.type_names()
    times = seq.times
    n = len(query.pattern)
    N = len(names)
    out: list[QueryMatch] = []

    def extend(picked: list[int]) -> None:
        depth = len(picked)
        if depth == n:
            out.append(QueryMatch(query.id, tuple(picked), float(times[picked[-1]] - times[picked[0]])))
            return
        want = query.pattern[depth]
        lo = picked[-1] + 1 if picked else 0
        if semantics is MatchSemantics.CONTIGUITY and picked:
            candidates = [lo] if lo < N else []
        elif semantics is MatchSemantics.NEXT and picked:
            nxt = next((j for j in range(lo, N) if names[j] == want), None)
            candidates = [] if nxt is None else [nxt]
        else:
            candidates = range(lo, N)
        for j in candidates:
            if picked and times[j] - times[picked[0]] > query.window:
                break
            if names[j] == want:
                extend(picked + [j])

    extend([])
    return out


def utility(
    seq: EventSequence,
    queries: Iterable[Query],
    semantics: MatchSemantics | str = MatchSemantics.ANY,
    alphabet: Alphabet | Iterable[str] | None = None,
) -> UtilityReport:
    """Per-query match counts, weighted utilities and their total."""
    counts: dict[str, int] = {}
    utils: dict[str, float] = {}
    for q in queries:
        c = count_matches(seq, q, semantics, alphabet)
        counts[q.id] = c
        utils[q.id] = q.utility_weight * c
    return UtilityReport(counts, utils, math.fsum(utils.values()))
