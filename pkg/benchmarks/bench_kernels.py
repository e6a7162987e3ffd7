"""Time each kernel under the numba and pure-numpy backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

The numba timings exclude compilation (one warm-up call per kernel). Every
pair of results is also compared, so a run doubles as a parity check.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cepshed.kernels import _numpy, get_backend


def _cases(rng):
    n_events = 20_000
    codes = rng.integers(0, 5, n_events).astype(np.int64)
    times = np.cumsum(rng.uniform(0.05, 0.2, n_events))
    seg = np.zeros(n_events, np.int64)
    pattern = np.array([0, 1, 2], np.int64)
    yield "count_any", (codes, times, seg, pattern, 3.0)
    yield "count_next", (codes, times, seg, pattern, 3.0)
    yield "count_contiguous", (codes, times, seg, pattern, 3.0)

    w = rng.integers(1, 50, 200).astype(np.int64)
    v = rng.uniform(1, 10, 200)
    yield "knapsack_01", (w, v, 2000)
    w2 = rng.integers(1, 20, 60).astype(np.int64)
    yield "knapsack_2d", (w[:60] // 3 + 1, w2, v[:60], 200, 200)

    sizes = rng.integers(1, 6, 80)
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    mem = rng.integers(0, 30, offsets[-1]).astype(np.int64)
    val = rng.uniform(0, 10, offsets[-1])
    yield "group_knapsack", (offsets, mem, val, 800)

    n, nq = 16, 8
    masks = np.array([int(rng.integers(1, 1 << n)) for _ in range(nq)], np.int64)
    table = rng.uniform(0, 10, 1 << nq)
    yield "scan_event_subsets", (rng.integers(1, 4, n).astype(float), masks, table, 12.0)

    offsets = np.arange(0, 13, 2, dtype=np.int64)
    positions = rng.integers(0, 6, 12).astype(np.int64)
    yield "grid_search", (24, rng.uniform(0.5, 2.0, 6), offsets, positions, rng.uniform(1, 5, 6))


def _time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    jit = get_backend("numba")
    if jit is _numpy:
        raise SystemExit("numba is not importable; nothing to compare")
    print(f"{'kernel':<20}{'numba s':>12}{'numpy s':>12}{'speedup':>10}  identical")
    for name, case in _cases(np.random.default_rng(args.seed)):
        getattr(jit, name)(*case)  # compile
        t_jit, a = _time(getattr(jit, name), case, args.repeat)
        t_np, b = _time(getattr(_numpy, name), case, args.repeat)
        print(f"{name:<20}{t_jit:>12.5f}{t_np:>12.5f}{t_np / t_jit:>9.1f}x  {_same(a, b)}")


if __name__ == "__main__":
    main()
