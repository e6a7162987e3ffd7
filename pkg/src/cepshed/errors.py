"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and the process exit
status the CLI uses for it (1 usage/parse, 2 infeasible/unsupported,
3 internal numerical failure).
"""

from __future__ import annotations


class CepShedError(Exception):
    code = "error"
    exit_code = 1


class InputError(CepShedError, ValueError):
    code = "invalid-input"
    exit_code = 1


class DuplicateTimestamp(InputError):
    code = "duplicate-timestamp"


class NonMonotoneTimestamps(InputError):
    code = "non-monotone-timestamps"


class IndexOutOfBounds(InputError, IndexError):
    code = "index-out-of-bounds"


class UnknownEventType(InputError, KeyError):
    code = "unknown-event-type"

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else self.code


class NonPositiveSpan(InputError):
    code = "non-positive-span"


class DimensionMismatch(InputError):
    code = "dimension-mismatch"


class ParseError(InputError):
    code = "parse-error"


class UnsupportedSemantics(CepShedError):
    code = "unsupported-semantics"
    exit_code = 2


class CountOverflow(CepShedError, OverflowError):
    code = "count-overflow"
    exit_code = 3


class NumericalInstability(CepShedError, ArithmeticError):
    code = "numerical-instability"
    exit_code = 3


class LpFailure(CepShedError):
    code = "lp-failure"
    exit_code = 3


class CouplingViolation(CepShedError):
    code = "coupling-violation"
    exit_code = 2


class InstanceTooLarge(CepShedError):
    code = "instance-too-large"
    exit_code = 2


class QueryLargerThanBudget(CepShedError):
    code = "query-larger-than-budget"
    exit_code = 2


class ComponentTooLarge(CepShedError):
    code = "component-too-large"
    exit_code = 2


class NonIntegralBudget(CepShedError):
    code = "non-integral-budget"
    exit_code = 2


class GridTooLarge(CepShedError):
    code = "grid-too-large"
    exit_code = 2


class LatticeTooLarge(CepShedError):
    code = "lattice-too-large"
    exit_code = 2


class NonPositiveBudget(CepShedError):
    code = "non-positive-budget"
    exit_code = 2


class MissingBudget(CepShedError):
    code = "missing-budget"
    exit_code = 2


class AllQueriesLinear(CepShedError):
    code = "all-queries-linear"
    exit_code = 2


class IncompatiblePlan(CepShedError):
    code = "incompatible-plan"
    exit_code = 2


class UnsupportedVariant(CepShedError):
    code = "unsupported-variant"
    exit_code = 2
