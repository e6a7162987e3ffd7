"""JIT-compiled kernels. Same signatures and results as ``_numpy``."""

import numpy as np
from numba import njit

NAME = "numba"
_I64_MAX = np.iinfo(np.int64).max


@njit(cache=True)
def _window_capacity(times, segments, window):
    cap = 1
    head = 0
    for i in range(times.shape[0]):
        while times[i] - times[head] > window or segments[head] != segments[i]:
            head += 1
        if i - head + 1 > cap:
            cap = i - head + 1
    return cap


@njit(cache=True)
def count_any(codes, times, segments, pattern, window):
    """Count skip-till-any-match matches; returns (count, overflowed)."""
    n = pattern.shape[0]
    N = codes.shape[0]
    if N == 0:
        return 0, False
    cap = _window_capacity(times, segments, window)
    partial = np.zeros((cap, n), np.int64)
    start_time = np.empty(cap, np.float64)
    start_seg = np.empty(cap, np.int64)
    first = 0
    size = 0
    total = 0
    overflow = False
    for i in range(N):
        t = times[i]
        c = codes[i]
        while size > 0 and (t - start_time[first] > window or start_seg[first] != segments[i]):
            first = (first + 1) % cap
            size -= 1
        for s in range(size):
            slot = (first + s) % cap
            for k in range(n - 1, 0, -1):
                if pattern[k] == c:
                    add = partial[slot, k - 1]
                    if add == 0:
                        continue
                    if k == n - 1:
                        if total > _I64_MAX - add:
                            overflow = True
                        total += add
                    else:
                        if partial[slot, k] > _I64_MAX - add:
                            overflow = True
                        partial[slot, k] += add
        if pattern[0] == c:
            if n == 1:
                total += 1
            else:
                slot = (first + size) % cap
                for k in range(n):
                    partial[slot, k] = 0
                partial[slot, 0] = 1
                start_time[slot] = t
                start_seg[slot] = segments[i]
                size += 1
    return total, overflow


@njit(cache=True)
def count_next(codes, times, segments, pattern, window):
    """Count skip-till-next-match matches: each pick is the first later
    occurrence of its pattern type."""
    n = pattern.shape[0]
    N = codes.shape[0]
    total = 0
    for i in range(N):
        if codes[i] != pattern[0]:
            continue
        j = i
        ok = True
        for k in range(1, n):
            j += 1
            while j < N and codes[j] != pattern[k]:
                j += 1
            if j >= N or times[j] - times[i] > window or segments[j] != segments[i]:
                ok = False
                break
        if ok:
            total += 1
    return total


@njit(cache=True)
def count_contiguous(codes, times, segments, pattern, window):
    n = pattern.shape[0]
    N = codes.shape[0]
    total = 0
    for i in range(N - n + 1):
        ok = True
        for k in range(n):
            if codes[i + k] != pattern[k]:
                ok = False
                break
        if ok and times[i + n - 1] - times[i] <= window and segments[i + n - 1] == segments[i]:
            total += 1
    return total


@njit(cache=True)
def knapsack_01(weights, values, capacity):
    """0-1 knapsack over integer weights; returns (best, chosen mask)."""
    n = weights.shape[0]
    dp = np.zeros(capacity + 1, np.float64)
    keep = np.zeros((n, capacity + 1), np.bool_)
    for i in range(n):
        w = weights[i]
        v = values[i]
        for c in range(capacity, w - 1, -1):
            cand = dp[c - w] + v
            if cand > dp[c]:
                dp[c] = cand
                keep[i, c] = True
    chosen = np.zeros(n, np.bool_)
    c = capacity
    for i in range(n - 1, -1, -1):
        if keep[i, c]:
            chosen[i] = True
            c -= weights[i]
    return dp[capacity], chosen


@njit(cache=True)
def knapsack_2d(w1, w2, values, cap1, cap2):
    n = w1.shape[0]
    dp = np.zeros((cap1 + 1, cap2 + 1), np.float64)
    keep = np.zeros((n, cap1 + 1, cap2 + 1), np.bool_)
    for i in range(n):
        a = w1[i]
        b = w2[i]
        v = values[i]
        for c1 in range(cap1, a - 1, -1):
            for c2 in range(cap2, b - 1, -1):
                cand = dp[c1 - a, c2 - b] + v
                if cand > dp[c1, c2]:
                    dp[c1, c2] = cand
                    keep[i, c1, c2] = True
    chosen = np.zeros(n, np.bool_)
    c1 = cap1
    c2 = cap2
    for i in range(n - 1, -1, -1):
        if keep[i, c1, c2]:
            chosen[i] = True
            c1 -= w1[i]
            c2 -= w2[i]
    return dp[cap1, cap2], chosen


@njit(cache=True)
def group_knapsack(offsets, option_mem, option_val, capacity):
    """Pick exactly one option per group under an integer budget.

    Group ``g`` owns options ``offsets[g]:offsets[g+1]``; earlier options win
    ties. Returns (best value, chosen option index per group).
    """
    groups = offsets.shape[0] - 1
    dp = np.zeros(capacity + 1, np.float64)
    choice = np.zeros((groups, capacity + 1), np.int64)
    for g in range(groups):
        new = np.full(capacity + 1, -np.inf)
        for o in range(offsets[g], offsets[g + 1]):
            m = option_mem[o]
            v = option_val[o]
            for c in range(m, capacity + 1):
                cand = dp[c - m] + v
                if cand > new[c]:
                    new[c] = cand
                    choice[g, c] = o
        dp = new
    picked = np.zeros(groups, np.int64)
    c = capacity
    for g in range(groups - 1, -1, -1):
        o = choice[g, c]
        picked[g] = o
        c -= option_mem[o]
    return dp[capacity], picked


@njit(cache=True)
def scan_event_subsets(weights, query_masks, table, budget):
    """Exhaustive scan over event subsets in lexicographic keep-vector order.

    Type ``j`` is bit ``n-1-j`` of the subset mask and query ``i`` bit
    ``q-1-i`` of the availability mask used to index ``table``. Returns the
    first subset attaining the maximum table value within ``budget``.
    """
    n = weights.shape[0]
    nq = query_masks.shape[0]
    best = -np.inf
    best_mask = -1
    for mask in range(1 << n):
        mem = 0.0
        for j in range(n):
            if (mask >> (n - 1 - j)) & 1:
                mem += weights[j]
        if mem > budget:
            continue
        avail = 0
        for i in range(nq):
            qm = query_masks[i]
            if (mask & qm) == qm:
                avail |= 1 << (nq - 1 - i)
        v = table[avail]
        if v > best:
            best = v
            best_mask = mask
    return best, best_mask


@njit(cache=True)
def grid_search(k, scale, query_offsets, query_positions, values):
    """Best point of the k-grid on the simplex under the min(1, q*scale/k) map.

    Grid points are visited in lexicographic order; the first maximiser wins.
    """
    n = scale.shape[0]
    q = np.zeros(n, np.int64)
    q[n - 1] = k
    x = np.empty(n, np.float64)
    best = -np.inf
    best_q = q.copy()
    nqueries = values.shape[0]
    while True:
        for j in range(n):
            xj = q[j] / k * scale[j]
            x[j] = xj if xj < 1.0 else 1.0
        total = 0.0
        for i in range(nqueries):
            prod = values[i]
            for p in range(query_offsets[i], query_offsets[i + 1]):
                prod *= x[query_positions[p]]
            total += prod
        if total > best:
            best = total
            best_q[:] = q
        # advance to the lexicographically next composition
        pos = -1
        suffix = 0
        for i in range(n - 2, -1, -1):
            suffix += q[i + 1]
            if suffix > 0:
                pos = i
                break
        if pos < 0:
            break
        q[pos] += 1
        for i in range(pos + 1, n):
            q[i] = 0
        q[n - 1] = suffix - 1
    return best, best_q
