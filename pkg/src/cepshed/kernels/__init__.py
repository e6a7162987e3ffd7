"""Numeric hot loops with two interchangeable backends.

The numba backend is used when numba imports cleanly and the environment
variable ``CEPSHED_DISABLE_NUMBA`` is unset (or ``0``); otherwise the
pure-numpy backend is used. Both return identical results.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _numpy

KERNEL_NAMES = (
    "count_any",
    "count_next",
    "count_contiguous",
    "knapsack_01",
    "knapsack_2d",
    "group_knapsack",
    "scan_event_subsets",
    "grid_search",
)


def _numba_disabled() -> bool:
    return os.environ.get("CEPSHED_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module called ``name`` ("numba" or "numpy").

    ``None`` picks the default according to the environment flag.
    """
    if name is None:
        name = "numpy" if _numba_disabled() else "numba"
    if name == "numpy":
        return _numpy
    if name == "numba":
        try:
            from . import _numba
        except ImportError:  # pragma: no cover - numba missing
            return _numpy
        return _numba
    raise ValueError(f"unknown kernel backend {name!r}")


backend = get_backend()
BACKEND = backend.NAME

count_any = backend.count_any
count_next = backend.count_next
count_contiguous = backend.count_contiguous
knapsack_01 = backend.knapsack_01
knapsack_2d = backend.knapsack_2d
group_knapsack = backend.group_knapsack
scan_event_subsets = backend.scan_event_subsets
grid_search = backend.grid_search
