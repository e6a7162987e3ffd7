"""Pure-numpy kernels. Same signatures and results as ``_numba``.

Floating-point accumulations follow the same operation order as the JIT
versions so both backends return bit-identical values.
"""

import itertools

import numpy as np

NAME = "numpy"
_I64_MAX = np.iinfo(np.int64).max


def count_any(codes, times, segments, pattern, window):
    n = pattern.shape[0]
    N = codes.shape[0]
    if N == 0:
        return 0, False
    # partial[s, k]: partial matches of the first k+1 pattern slots started at s
    partial = np.zeros((N, n), np.int64)
    start_time = np.empty(N)
    start_seg = np.empty(N, np.int64)
    first = 0
    size = 0
    total = 0
    overflow = False
    slots_for = [np.flatnonzero(pattern[1:] == c) + 1 for c in range(int(pattern.max()) + 1)]
    for i in range(N):
        t = times[i]
        c = int(codes[i])
        seg = segments[i]
        while first < size and (t - start_time[first] > window or start_seg[first] != seg):
            first += 1
        if first < size and 0 <= c < len(slots_for):
            active = partial[first:size]
            for k in slots_for[c][::-1]:
                add = active[:, k - 1]
                if k == n - 1:
                    s = int(add.sum(dtype=np.uint64)) if add.size else 0
                    if s > _I64_MAX or total > _I64_MAX - s:
                        overflow = True
                    total += s
                else:
                    if np.any(active[:, k] > _I64_MAX - add):
                        overflow = True
                    active[:, k] += add
        if c == pattern[0]:
            if n == 1:
                total += 1
            else:
                partial[size, 0] = 1
                start_time[size] = t
                start_seg[size] = seg
                size += 1
    return total, overflow


def count_next(codes, times, segments, pattern, window):
    N = codes.shape[0]
    n = pattern.shape[0]
    if N == 0:
        return 0
    pos = np.flatnonzero(codes == pattern[0])
    ok = np.ones(pos.shape[0], bool)
    cur = pos.copy()
    for k in range(1, n):
        hits = np.flatnonzero(codes == pattern[k])
        where = np.searchsorted(hits, cur + 1)
        nxt = np.where(where < hits.shape[0], hits[np.minimum(where, hits.shape[0] - 1)], N)
        ok &= nxt < N
        cur = np.where(nxt < N, nxt, cur)
    ok &= times[cur] - times[pos] <= window
    ok &= segments[cur] == segments[pos]
    return int(np.count_nonzero(ok))


def count_contiguous(codes, times, segments, pattern, window):
    n = pattern.shape[0]
    N = codes.shape[0]
    if N < n:
        return 0
    m = N - n + 1
    ok = np.ones(m, bool)
    for k in range(n):
        ok &= codes[k : k + m] == pattern[k]
    ok &= times[n - 1 : n - 1 + m] - times[:m] <= window
    ok &= segments[n - 1 : n - 1 + m] == segments[:m]
    return int(np.count_nonzero(ok))


def knapsack_01(weights, values, capacity):
    n = weights.shape[0]
    dp = np.zeros(capacity + 1)
    keep = np.zeros((n, capacity + 1), bool)
    for i in range(n):
        w = int(weights[i])
        if w > capacity:
            continue
        cand = dp[: capacity + 1 - w] + values[i]
        better = cand > dp[w:]
        keep[i, w:] = better
        dp[w:] = np.where(better, cand, dp[w:])
    chosen = np.zeros(n, bool)
    c = capacity
    for i in range(n - 1, -1, -1):
        if keep[i, c]:
            chosen[i] = True
            c -= int(weights[i])
    return dp[capacity], chosen


def knapsack_2d(w1, w2, values, cap1, cap2):
    n = w1.shape[0]
    dp = np.zeros((cap1 + 1, cap2 + 1))
    keep = np.zeros((n, cap1 + 1, cap2 + 1), bool)
    for i in range(n):
        a, b = int(w1[i]), int(w2[i])
        if a > cap1 or b > cap2:
            continue
        cand = dp[: cap1 + 1 - a, : cap2 + 1 - b] + values[i]
        better = cand > dp[a:, b:]
        keep[i, a:, b:] = better
        dp[a:, b:] = np.where(better, cand, dp[a:, b:])
    chosen = np.zeros(n, bool)
    c1, c2 = cap1, cap2
    for i in range(n - 1, -1, -1):
        if keep[i, c1, c2]:
            chosen[i] = True
            c1 -= int(w1[i])
            c2 -= int(w2[i])
    return dp[cap1, cap2], chosen


def group_knapsack(offsets, option_mem, option_val, capacity):
    groups = offsets.shape[0] - 1
    dp = np.zeros(capacity + 1)
    choice = np.zeros((groups, capacity + 1), np.int64)
    for g in range(groups):
        new = np.full(capacity + 1, -np.inf)
        for o in range(offsets[g], offsets[g + 1]):
            m = int(option_mem[o])
            if m > capacity:
                continue
            cand = dp[: capacity + 1 - m] + option_val[o]
            better = cand > new[m:]
            choice[g, m:][better] = o
            new[m:] = np.where(better, cand, new[m:])
        dp = new
    picked = np.zeros(groups, np.int64)
    c = capacity
    for g in range(groups - 1, -1, -1):
        o = choice[g, c]
        picked[g] = o
        c -= int(option_mem[o])
    return dp[capacity], picked


_CHUNK = 1 << 16


def scan_event_subsets(weights, query_masks, table, budget):
    n = weights.shape[0]
    nq = query_masks.shape[0]
    best = -np.inf
    best_mask = -1
    total = 1 << n
    for lo in range(0, total, _CHUNK):
        masks = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        mem = np.zeros(masks.shape[0])
        for j in range(n):
            bit = ((masks >> (n - 1 - j)) & 1).astype(bool)
            mem = np.where(bit, mem + weights[j], mem)
        avail = np.zeros(masks.shape[0], np.int64)
        for i in range(nq):
            qm = query_masks[i]
            avail |= np.where((masks & qm) == qm, np.int64(1) << (nq - 1 - i), 0)
        vals = np.where(mem <= budget, table[avail], -np.inf)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            best_mask = int(masks[k])
    return best, best_mask


def compositions(n, k):
    """All length-n nonnegative integer vectors summing to k, lexicographic.

    Stars and bars: ascending bar positions give ascending compositions.
    """
    if n == 1:
        return np.array([[k]], np.int64)
    bars = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(k + n - 1), n - 1)),
        dtype=np.int64,
    ).reshape(-1, n - 1)
    edges = np.column_stack(
        [np.full(bars.shape[0], -1, np.int64), bars, np.full(bars.shape[0], k + n - 1, np.int64)]
    )
    return np.diff(edges, axis=1) - 1


def grid_search(k, scale, query_offsets, query_positions, values):
    n = scale.shape[0]
    q = compositions(n, int(k))
    best = -np.inf
    best_q = q[0].copy()
    for lo in range(0, q.shape[0], _CHUNK):
        block = q[lo : lo + _CHUNK]
        x = np.minimum(block / k * scale, 1.0)
        total = np.zeros(block.shape[0])
        for i in range(values.shape[0]):
            prod = np.full(block.shape[0], values[i])
            for p in range(query_offsets[i], query_offsets[i + 1]):
                prod = prod * x[:, query_positions[p]]
            total = total + prod
        j = int(np.argmax(total))
        if total[j] > best:
            best = float(total[j])
            best_q = block[j].copy()
    return best, best_q
