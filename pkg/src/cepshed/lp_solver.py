"""Dense two-phase primal simplex for the small LPs used by the planners.

Dantzig pricing with a switch to Bland's rule after a run of degenerate
pivots. All tolerances live in module constants.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, InputError, NumericalInstability

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-12
COST_TOL = 1e-9
_DEGENERATE_STREAK = 50


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


class Relation(str, Enum):
    LE = "<="
    EQ = "=="
    GE = ">="

    @classmethod
    def parse(cls, value: "str | Relation") -> "Relation":
        if isinstance(value, cls):
            return value
        table = {"<=": cls.LE, "le": cls.LE, "=": cls.EQ, "==": cls.EQ, "eq": cls.EQ,
                 ">=": cls.GE, "ge": cls.GE}
        try:
            return table[str(value).strip().lower()]
        except KeyError:
            raise InputError(f"unknown constraint relation {value!r}") from None


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    coefficients: tuple[float, ...]
    relation: Relation
    rhs: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "relation", Relation.parse(self.relation))
        object.__setattr__(self, "rhs", float(self.rhs))


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple[float, ...]
    sense: Sense = Sense.MIN
    constraints: tuple[Constraint, ...] = ()
    bounds: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        obj = tuple(float(c) for c in self.objective)
        n = len(obj)
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "sense", Sense(self.sense))
        cons = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints)
        object.__setattr__(self, "constraints", cons)
        for k, c in enumerate(cons):
            if len(c.coefficients) != n:
                raise DimensionMismatch(
                    f"constraint {k} has {len(c.coefficients)} coefficients, objective has {n}"
                )
        bounds = self.bounds
        if bounds is None:
            bounds = tuple((0.0, math.inf) for _ in range(n))
        bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
        if len(bounds) != n:
            raise DimensionMismatch(f"{len(bounds)} variable bounds for {n} variables")
        for j, (lo, hi) in enumerate(bounds):
            if math.isnan(lo) or math.isnan(hi) or lo > hi or lo == math.inf or hi == -math.inf:
                raise InputError(f"invalid bounds [{lo}, {hi}] for variable {j}")
        object.__setattr__(self, "bounds", bounds)
        finite = [*obj, *(v for c in cons for v in (*c.coefficients, c.rhs))]
        if not all(math.isfinite(v) for v in finite):
            raise InputError("LP coefficients must be finite")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def residual(self, x: Sequence[float]) -> float:
        """Largest violation of any constraint or bound by ``x``."""
        x = np.asarray(x, float)
        worst = 0.0
        for c in self.constraints:
            lhs = float(np.dot(c.coefficients, x))
            if c.relation is Relation.LE:
                worst = max(worst, lhs - c.rhs)
            elif c.relation is Relation.GE:
                worst = max(worst, c.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - c.rhs))
        for v, (lo, hi) in zip(x, self.bounds):
            worst = max(worst, lo - v, v - hi)
        return worst


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    values: tuple[float, ...] = field(default=())
    objective_value: float = math.nan

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Standard-form tableau: minimise ``cost`` over ``A z = b, z >= 0``."""

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int]):
        m, n = A.shape
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = A
        self.T[:m, n] = b
        self.basis = basis
        self.m = m
        self.n = n

    def set_cost(self, cost: np.ndarray) -> None:
        row = self.T[self.m]
        row[:] = 0.0
        row[: cost.shape[0]] = cost
        for r, j in enumerate(self.basis):
            if row[j] != 0.0:
                row -= row[j] * self.T[r]

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        piv = T[r, j]
        if abs(piv) < PIVOT_TOL:
            raise NumericalInstability(f"pivot magnitude {abs(piv):.3g} below {PIVOT_TOL}")
        T[r] /= piv
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[r, j] = 1.0
        self.basis[r] = j

    def run(self, allowed: np.ndarray) -> bool:
        """Optimise the current cost row; False when unbounded."""
        T, m = self.T, self.m
        limit = 200 * (m + self.n) + 1000
        streak = 0
        bland = False
        for _ in range(limit):
            reduced = np.where(allowed, T[m, : self.n], 0.0)
            candidates = np.flatnonzero(reduced < -COST_TOL)
            if candidates.size == 0:
                return True
            j = int(candidates[0]) if bland else int(candidates[np.argmin(reduced[candidates])])
            col = T[:m, j]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return False
            ratios = T[rows, self.n] / col[rows]
            best = ratios.min()
            tied = rows[ratios <= best + FEAS_TOL * max(1.0, abs(best))]
            r = int(min(tied, key=lambda i: self.basis[i]))
            if T[r, self.n] <= FEAS_TOL:
                streak += 1
                bland = bland or streak >= _DEGENERATE_STREAK
            else:
                streak = 0
            self.pivot(r, j)
        raise NumericalInstability("simplex iteration limit reached (cycling suspected)")


def _standard_form(lp: LinearProgram):
    """Shift/split variables so every structural column is >= 0.

    Returns (A, b, relations, cost, recover) where ``recover`` maps a
    standard-form point back to the original variables.
    """
    n = lp.num_vars
    cols: list[tuple[int, float]] = []  # (original var, sign)
    offset = np.zeros(n)
    extra_rows: list[tuple[np.ndarray, Relation, float]] = []
    for j, (lo, hi) in enumerate(lp.bounds):
        if math.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            if math.isfinite(hi):
                extra_rows.append((np.array([len(cols) - 1]), Relation.LE, hi - lo))
        elif math.isfinite(hi):
            offset[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    k = len(cols)
    M = np.zeros((n, k))
    for c, (j, s) in enumerate(cols):
        M[j, c] = s
    rows, rels, rhs = [], [], []
    for con in lp.constraints:
        a = np.asarray(con.coefficients)
        rows.append(a @ M)
        rels.append(con.relation)
        rhs.append(con.rhs - float(a @ offset))
    for idx, rel, val in extra_rows:
        row = np.zeros(k)
        row[idx] = 1.0
        rows.append(row)
        rels.append(rel)
        rhs.append(val)
    c = np.asarray(lp.objective)
    if lp.sense is Sense.MAX:
        c = -c
    cost = c @ M
    A = np.array(rows).reshape(len(rows), k)
    return A, np.array(rhs, float), rels, cost, (M, offset)


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` to a basic optimal point, or report infeasible/unbounded."""
    A, b, rels, cost, (M, offset) = _standard_form(lp)
    m, k = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign
    rels = [
        r if s > 0 else {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}[r]
        for r, s in zip(rels, sign)
    ]
    n_slack = sum(r is not Relation.EQ for r in rels)
    n_art = sum(r is not Relation.LE for r in rels)
    width = k + n_slack + n_art
    full = np.zeros((m, width))
    full[:, :k] = A
    basis: list[int] = []
    s_col, a_col = k, k + n_slack
    for i, r in enumerate(rels):
        if r is Relation.LE:
            full[i, s_col] = 1.0
            basis.append(s_col)
            s_col += 1
        else:
            if r is Relation.GE:
                full[i, s_col] = -1.0
                s_col += 1
            full[i, a_col] = 1.0
            basis.append(a_col)
            a_col += 1
    tab = _Tableau(full, b, basis)
    is_art = np.zeros(width, bool)
    is_art[k + n_slack :] = True

    if n_art:
        phase1 = np.zeros(width)
        phase1[is_art] = 1.0
        tab.set_cost(phase1)
        tab.run(np.ones(width, bool))
        if -tab.T[m, width] > FEAS_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
            return LpSolution(LpStatus.INFEASIBLE)
        # drive remaining (zero-valued) artificials out of the basis
        keep_rows = np.ones(m, bool)
        for r in range(m):
            if is_art[tab.basis[r]]:
                row = tab.T[r, :width]
                cand = np.flatnonzero((np.abs(row) > 1e-9) & ~is_art)
                if cand.size:
                    tab.pivot(r, int(cand[np.argmax(np.abs(row[cand]))]))
                else:
                    keep_rows[r] = False
        if not keep_rows.all():
            body = np.vstack([tab.T[:m][keep_rows], tab.T[m:]])
            tab.T = body
            tab.basis = [j for j, keep in zip(tab.basis, keep_rows) if keep]
            tab.m = int(keep_rows.sum())
            m = tab.m

    phase2 = np.zeros(width)
    phase2[:k] = cost
    tab.set_cost(phase2)
    allowed = ~is_art
    if not tab.run(allowed):
        obj = -math.inf if lp.sense is Sense.MIN else math.inf
        return LpSolution(LpStatus.UNBOUNDED, (), obj)

    z = np.zeros(width)
    for r, j in enumerate(tab.basis):
        z[j] = tab.T[r, width]
    z = np.maximum(z, 0.0)
    x = M @ z[:k] + offset
    lo = np.array([bd[0] for bd in lp.bounds])
    hi = np.array([bd[1] for bd in lp.bounds])
    x = np.clip(x, lo, hi)
    x[np.abs(x) < 1e-15] = 0.0
    value = float(np.dot(lp.objective, x))
    return LpSolution(LpStatus.OPTIMAL, tuple(float(v) for v in x), value)
