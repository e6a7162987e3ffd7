"""Load shedding for sequence queries over event streams."""

__version__ = "0.1.0"

from .errors import CepShedError  # noqa: E402
from .event_model import (  # noqa: E402
    Alphabet,
    EventInstance,
    EventSequence,
    EventType,
    MatchSemantics,
    Query,
    sequence_from_string,
    subsequence_relation,
    validate_sequence,
)
from .matcher import count_matches, enumerate_matches, utility  # noqa: E402

__all__ = [
    "Alphabet",
    "CepShedError",
    "EventInstance",
    "EventSequence",
    "EventType",
    "MatchSemantics",
    "Query",
    "__version__",
    "count_matches",
    "enumerate_matches",
    "sequence_from_string",
    "subsequence_relation",
    "utility",
    "validate_sequence",
]
