"""Event types, timestamped sequences, sequence queries and join semantics."""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    DuplicateTimestamp,
    IndexOutOfBounds,
    InputError,
    NonMonotoneTimestamps,
    UnknownEventType,
)


class MatchSemantics(str, Enum):
    """Which subsequences of a stream count as query matches."""

    ANY = "any"  # skip-till-any-match
    NEXT = "next"  # skip-till-next-match (type-contiguous)
    CONTIGUITY = "contiguity"

    @classmethod
    def parse(cls, value: "str | MatchSemantics") -> "MatchSemantics":
        if isinstance(value, cls):
            return value
        aliases = {
            "any": cls.ANY,
            "anymatch": cls.ANY,
            "skip-till-any-match": cls.ANY,
            "next": cls.NEXT,
            "nextmatch": cls.NEXT,
            "skip-till-next-match": cls.NEXT,
            "contiguity": cls.CONTIGUITY,
            "contiguous": cls.CONTIGUITY,
        }
        key = str(value).strip().lower().replace("_", "-")
        if key not in aliases:
            raise InputError(f"unknown match semantics {value!r}")
        return aliases[key]


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise InputError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class EventType:
    """A member of the alphabet.

    ``memory_cost`` is the memory held by one stored instance and
    ``arrival_rate`` the expected number of instances per unit time.
    """

    id: str
    memory_cost: float = 1.0
    arrival_rate: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise InputError("event type id must be a non-empty string")
        object.__setattr__(self, "memory_cost", _positive("memory_cost", self.memory_cost))
        object.__setattr__(self, "arrival_rate", _positive("arrival_rate", self.arrival_rate))

    @property
    def memory_rate(self) -> float:
        """Memory consumed per unit time when every instance is kept."""
        return self.arrival_rate * self.memory_cost


class Alphabet(Sequence[EventType]):
    """Ordered registry of event types with dense integer handles."""

    def __init__(self, types: Iterable[EventType]):
        self._types = tuple(types)
        self._index: dict[str, int] = {}
        for handle, etype in enumerate(self._types):
            if etype.id in self._index:
                raise InputError(f"duplicate event type {etype.id!r} in alphabet")
            self._index[etype.id] = handle

    def __getitem__(self, item):  # type: ignore[override]
        return self._types[item]

    def __len__(self) -> int:
        return len(self._types)

    def __contains__(self, name: object) -> bool:
        if isinstance(name, EventType):
            return name.id in self._index
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and self._types == other._types

    def __hash__(self) -> int:
        return hash(self._types)

    def __repr__(self) -> str:
        return f"Alphabet({[t.id for t in self._types]})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(t.id for t in self._types)

    def index(self, name: str) -> int:  # type: ignore[override]
        try:
            return self._index[name]
        except KeyError:
            raise UnknownEventType(f"unknown event type {name!r}") from None

    def get(self, name: str) -> EventType:
        return self._types[self.index(name)]


@dataclass(frozen=True)
class EventInstance:
    type_id: str
    timestamp: float

    def __post_init__(self) -> None:
        ts = float(self.timestamp)
        if not math.isfinite(ts):
            raise InputError(f"timestamp must be finite, got {self.timestamp!r}")
        object.__setattr__(self, "timestamp", ts)


class EventSequence(Sequence[EventInstance]):
    """A temporally ordered stream with unique timestamps.

    Stored column-wise: ``codes[k]`` indexes into ``types`` and ``times`` is
    strictly increasing. Both arrays are read-only.
    """

    __slots__ = ("types", "codes", "times", "_lookup")

    def __init__(self, types: Sequence[str], codes: np.ndarray, times: np.ndarray):
        self.types = tuple(types)
        codes = np.ascontiguousarray(codes, dtype=np.int64)
        times = np.ascontiguousarray(times, dtype=np.float64)
        if codes.shape != times.shape or codes.ndim != 1:
            raise InputError("codes and times must be 1-d arrays of equal length")
        if codes.size and (codes.min() < 0 or codes.max() >= len(self.types)):
            raise InputError("event code outside the type vocabulary")
        _check_times(times)
        codes.setflags(write=False)
        times.setflags(write=False)
        self.codes = codes
        self.times = times
        self._lookup = {name: k for k, name in enumerate(self.types)}

    @classmethod
    def empty(cls) -> "EventSequence":
        return cls((), np.empty(0, np.int64), np.empty(0, np.float64))

    def __len__(self) -> int:
        return int(self.codes.shape[0])

    def __getitem__(self, item):  # type: ignore[override]
        if isinstance(item, slice):
            return EventSequence(self.types, self.codes[item], self.times[item])
        k = int(item)
        return EventInstance(self.types[self.codes[k]], float(self.times[k]))

    def __iter__(self) -> Iterator[EventInstance]:
        for code, ts in zip(self.codes.tolist(), self.times.tolist()):
            yield EventInstance(self.types[code], ts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventSequence) or len(self) != len(other):
            return False
        return self.type_names() == other.type_names() and bool(
            np.array_equal(self.times, other.times)
        )

    def __hash__(self) -> int:
        return hash((self.type_names(), self.times.tobytes()))

    def __repr__(self) -> str:
        head = ", ".join(f"{e.type_id}@{e.timestamp:g}" for e in list(self)[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"EventSequence([{head}{more}])"

    def type_names(self) -> tuple[str, ...]:
        return tuple(self.types[c] for c in self.codes.tolist())

    def code_of(self, name: str) -> int:
        """Code of ``name`` in this sequence's vocabulary, or -1 if absent."""
        return self._lookup.get(name, -1)

    def count_type(self, name: str) -> int:
        code = self.code_of(name)
        return 0 if code < 0 else int(np.count_nonzero(self.codes == code))

    def filter(self, mask: np.ndarray) -> "EventSequence":
        mask = np.asarray(mask, dtype=bool)
        return EventSequence(self.types, self.codes[mask], self.times[mask])

    def without_types(self, names: Iterable[str]) -> "EventSequence":
        drop = [self.code_of(n) for n in names]
        return self.filter(~np.isin(self.codes, [c for c in drop if c >= 0]))


def _check_times(times: np.ndarray) -> None:
    if times.size == 0:
        return
    if not np.all(np.isfinite(times)):
        raise InputError("timestamps must be finite")
    gaps = np.diff(times)
    if np.any(gaps == 0):
        k = int(np.flatnonzero(gaps == 0)[0])
        raise DuplicateTimestamp(f"events {k} and {k + 1} share timestamp {times[k]!r}")
    if np.any(gaps < 0):
        k = int(np.flatnonzero(gaps < 0)[0])
        raise NonMonotoneTimestamps(
            f"timestamp decreases from {times[k]!r} to {times[k + 1]!r} at position {k + 1}"
        )


def validate_sequence(events: Iterable[EventInstance]) -> EventSequence:
    """Build an :class:`EventSequence`, rejecting ties and out-of-order events."""
    events = list(events)
    names: list[str] = []
    lookup: dict[str, int] = {}
    codes = np.empty(len(events), np.int64)
    times = np.empty(len(events), np.float64)
    for k, ev in enumerate(events):
        if ev.type_id not in lookup:
            lookup[ev.type_id] = len(names)
            names.append(ev.type_id)
        codes[k] = lookup[ev.type_id]
        times[k] = ev.timestamp
    return EventSequence(names, codes, times)


def sequence_from_string(text: str) -> EventSequence:
    """Parse the compact ``"A1 B2 C3"`` notation (type letters + timestamp)."""
    events = []
    for token in text.replace(",", " ").split():
        split = 0
        while split < len(token) and not (token[split].isdigit() or token[split] in "+-."):
            split += 1
        if split == 0 or split == len(token):
            raise InputError(f"cannot parse event token {token!r}")
        events.append(EventInstance(token[:split], float(token[split:])))
    return validate_sequence(events)


@dataclass(frozen=True)
class Query:
    """``SEQ(q_1, ..., q_n)`` evaluated over a sliding time window."""

    id: str
    pattern: tuple[str, ...]
    window: float
    utility_weight: float = 1.0
    cpu_cost_per_match: float = 1.0
    expected_matches: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise InputError("query id must be a non-empty string")
        if isinstance(self.pattern, str):
            raise InputError("pattern must be a sequence of event type names")
        pattern = tuple(self.pattern)
        if not pattern:
            raise InputError(f"query {self.id!r} has an empty pattern")
        object.__setattr__(self, "pattern", pattern)
        object.__setattr__(self, "window", _positive("window", self.window))
        object.__setattr__(self, "utility_weight", _positive("utility_weight", self.utility_weight))
        object.__setattr__(
            self, "cpu_cost_per_match", _positive("cpu_cost_per_match", self.cpu_cost_per_match)
        )
        if self.expected_matches is not None:
            n = float(self.expected_matches)
            if not (math.isfinite(n) and n >= 0):
                raise InputError(f"expected_matches must be >= 0, got {n!r}")
            object.__setattr__(self, "expected_matches", n)

    def __len__(self) -> int:
        return len(self.pattern)

    @property
    def event_types(self) -> tuple[str, ...]:
        """Distinct pattern types in first-occurrence order."""
        return tuple(dict.fromkeys(self.pattern))

    @property
    def multiplicities(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for name in self.pattern:
            counts[name] = counts.get(name, 0) + 1
        return counts

    @property
    def is_regular(self) -> bool:
        """True when no event type repeats within the pattern."""
        return len(set(self.pattern)) == len(self.pattern)

    def with_expected_matches(self, n: float) -> "Query":
        return Query(
            self.id, self.pattern, self.window, self.utility_weight, self.cpu_cost_per_match, n
        )


@dataclass(frozen=True)
class SubsequenceFlags:
    contiguous: bool
    type_contiguous: bool
    indices: tuple[int, ...] = field(default=(), compare=False)


def subsequence_relation(seq: EventSequence, indices: Sequence[int]) -> SubsequenceFlags:
    """Classify the subsequence picked by ``indices``.

    Contiguous: consecutive positions. Type-contiguous: no skipped event
    between two consecutive picks has the type of the later pick.
    """
    idx = [int(i) for i in indices]
    n = len(seq)
    for i in idx:
        if i < 0 or i >= n:
            raise IndexOutOfBounds(f"index {i} outside sequence of length {n}")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise InputError(f"indices must be strictly increasing, got {idx}")
    contiguous = all(b == a + 1 for a, b in zip(idx, idx[1:]))
    codes = seq.codes
    type_contiguous = True
    for a, b in zip(idx, idx[1:]):
        if b > a + 1 and np.any(codes[a + 1 : b] == codes[b]):
            type_contiguous = False
            break
    return SubsequenceFlags(contiguous, type_contiguous, tuple(idx))
