"""Pure-Python/numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The two are checked against each other in ``tests/test_kernels.py``.
"""
from bisect import bisect_left, bisect_right

import numpy as np


def lower_hull(x, y):
    """Vertices of the lower convex hull of points sorted by strictly increasing x.

    Single monotone-chain sweep.  Points on a hull edge (zero cross product)
    are popped, so only strict vertices are returned.
    """
    xs = np.asarray(x, dtype=np.float64).tolist()
    ys = np.asarray(y, dtype=np.float64).tolist()
    hull = []
    for i in range(len(xs)):
        xi = xs[i]
        yi = ys[i]
        while len(hull) >= 2:
            a = hull[-2]
            b = hull[-1]
            if (xs[b] - xs[a]) * (yi - ys[a]) - (ys[b] - ys[a]) * (xi - xs[a]) <= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=np.int64)


def holder_sup_uniform(y, h, alpha):
    """max_{i<j} |y_j - y_i| / ((j - i) h)^alpha for samples on a uniform grid."""
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    best = 0.0
    for d in range(1, n):
        q = np.max(np.abs(y[d:] - y[:-d])) / (d * h) ** alpha
        if q > best:
            best = q
    return float(best)


def _end_lengths(v, strict):
    tails = []
    out = [0] * len(v)
    search = bisect_left if strict else bisect_right
    for i, val in enumerate(v):
        pos = search(tails, val)
        if pos == len(tails):
            tails.append(val)
        else:
            tails[pos] = val
        out[i] = pos + 1
    return out


def lis_length(v, strict=False):
    """Length of the longest nondecreasing (strictly increasing) subsequence."""
    v = np.asarray(v, dtype=np.float64).tolist()
    if not v:
        return 0
    return max(_end_lengths(v, strict))


def lis_indices(v, strict=False):
    """Indices of the lexicographically smallest longest nondecreasing subsequence.

    ``strict=True`` asks for strictly increasing instead.
    """
    vals = np.asarray(v, dtype=np.float64).tolist()
    n = len(vals)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    # longest chain starting at i == longest reversed chain ending at i
    start = _end_lengths([-t for t in reversed(vals)], strict)[::-1]
    need = max(start)
    picked = []
    last = None
    for i in range(n):
        if start[i] != need:
            continue
        if last is not None:
            if strict and not vals[i] > last:
                continue
            if not strict and not vals[i] >= last:
                continue
        picked.append(i)
        last = vals[i]
        need -= 1
        if need == 0:
            break
    return np.asarray(picked, dtype=np.int64)


def convex_chain(x, y, tol=0.0, strict=False):
    """Longest subsequence of points whose consecutive chord slopes are nondecreasing.

    A triple k < i < j is accepted when slope(k, i) <= slope(i, j) + tol
    (``<`` when ``strict``).  Dynamic programme over the last two chosen
    points; for each middle point the incoming slopes are sorted once so every
    outgoing pair is resolved by a binary search.  O(m^2 log m) time, O(m^2)
    memory.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m = x.shape[0]
    if m <= 2:
        return np.arange(m, dtype=np.int64)
    dp = np.full((m, m), 2, dtype=np.int16)
    parent = np.full((m, m), -1, dtype=np.int16)
    side = "left" if strict else "right"
    for i in range(1, m - 1):
        s_in = (y[i] - y[:i]) / (x[i] - x[:i])
        order = np.argsort(s_in, kind="stable")
        s_sorted = s_in[order]
        vals = dp[:i, i][order]
        best = np.maximum.accumulate(vals)
        fresh = np.empty(i, dtype=bool)
        fresh[0] = True
        fresh[1:] = best[1:] > best[:-1]
        where = np.maximum.accumulate(np.where(fresh, np.arange(i), 0))
        s_out = (y[i + 1:] - y[i]) / (x[i + 1:] - x[i])
        pos = np.searchsorted(s_sorted, s_out + tol, side=side)
        ok = pos > 0
        if not ok.any():
            continue
        j = np.flatnonzero(ok)
        p = pos[j] - 1
        cand = best[p] + 1
        row = dp[i, i + 1:]
        better = cand > row[j]
        j = j[better]
        dp[i, i + 1 + j] = cand[better]
        parent[i, i + 1 + j] = order[where[p[better]]]
    flat = np.triu(dp, 1).argmax()
    i, j = divmod(int(flat), m)
    chain = [j, i]
    while parent[i, j] >= 0:
        k = int(parent[i, j])
        chain.append(k)
        i, j = k, i
    return np.asarray(chain[::-1], dtype=np.int64)
