"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np


def count_by_combinations(names, times, pattern, window, semantics="any"):
    """Count matches by enumerating every index tuple (exponential)."""
    n = len(pattern)
    total = 0
    for idx in itertools.combinations(range(len(names)), n):
        if any(names[i] != p for i, p in zip(idx, pattern)):
            continue
        if times[idx[-1]] - times[idx[0]] > window:
            continue
        if semantics == "contiguity" and any(b != a + 1 for a, b in zip(idx, idx[1:])):
            continue
        if semantics == "next" and any(
            names[k] == names[b] for a, b in zip(idx, idx[1:]) for k in range(a + 1, b)
        ):
            continue
        total += 1
    return total


def poisson_window_rate(lams_by_type, pattern, window):
    """Exact expected increasing-tuple count in one window per unit time, distinct types."""
    assert len(set(pattern)) == len(pattern)
    prod = 1.0
    for t in pattern:
        prod *= lams_by_type[t] * window
    return prod / math.factorial(len(pattern)) / window


def lp_vertex_enumeration(c, A_ub, b_ub, lo, hi, sense="max"):
    """Optimum of an LP over a box by enumerating every basis (tiny sizes)."""
    c = np.asarray(c, float)
    n = c.size
    rows = [np.asarray(a, float) for a in A_ub]
    rhs = list(b_ub)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rows.append(e)
        rhs.append(hi[j])
        rows.append(-e)
        rhs.append(-lo[j])
    A = np.array(rows)
    b = np.array(rhs)
    best = None
    for combo in itertools.combinations(range(len(rows)), n):
        sub = A[list(combo)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, b[list(combo)])
        if np.all(A @ x <= b + 1e-9):
            val = float(c @ x)
            if best is None or (val > best if sense == "max" else val < best):
                best = val
    return best
