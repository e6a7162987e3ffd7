"""Mapping real weights and budgets onto the integer grids the DPs run on.

Weights are rounded up and budgets down, so a plan that fits the rounded
instance fits the real one. When every quantity is already a multiple of a
candidate resolution the coarsest such resolution is used and the rounding
is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import LatticeTooLarge, NonIntegralBudget

CANDIDATE_RESOLUTIONS = (1.0, 0.5, 0.25, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001)
DEFAULT_RESOLUTION = 1e-3
MAX_CELLS = 50_000_000
_GRID_TOL = 1e-9


@dataclass(frozen=True)
class Discretization:
    resolution: float
    weights: np.ndarray
    capacity: int
    exact: bool

    def describe(self) -> dict:
        return {"resolution": self.resolution, "exact": self.exact, "capacity": self.capacity}


def _on_grid(values: np.ndarray, r: float) -> bool:
    scaled = values / r
    return bool(np.all(np.abs(scaled - np.round(scaled)) <= _GRID_TOL * np.maximum(1.0, np.abs(scaled))))


def pick_resolution(values: np.ndarray) -> float:
    values = np.asarray(values, float)
    for r in CANDIDATE_RESOLUTIONS:
        if _on_grid(values, r):
            return r
    return DEFAULT_RESOLUTION


def discretize(
    weights, budget: float, resolution: float | None = None, require_exact: bool = False
) -> Discretization:
    """Integer weights (ceil) and capacity (floor) at ``resolution``.

    The capacity never exceeds the total weight, which keeps the DP table
    small when the budget is abundant.
    """
    weights = np.asarray(weights, float)
    both = np.append(weights, budget)
    r = pick_resolution(both) if resolution is None else float(resolution)
    exact = _on_grid(both, r)
    if require_exact and not exact:
        raise NonIntegralBudget(f"weights or budget are not multiples of resolution {r}")
    scaled = weights / r
    w = np.ceil(scaled - _GRID_TOL * np.maximum(1.0, scaled)).astype(np.int64)
    w = np.maximum(w, 0)
    cap_real = budget / r
    cap = math.floor(cap_real + _GRID_TOL * max(1.0, cap_real))
    cap = int(min(cap, int(w.sum())))
    return Discretization(r, w, max(cap, 0), exact)


def check_cells(cells: int, what: str) -> None:
    if cells > MAX_CELLS:
        raise LatticeTooLarge(f"{what} needs {cells} DP cells (limit {MAX_CELLS})")
