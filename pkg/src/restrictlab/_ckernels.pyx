# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``; identical signatures."""
import numpy as np

from libc.math cimport fabs, pow


def lower_hull(x, y):
    cdef const double[::1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] ys = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] hull = out
    cdef Py_ssize_t i, top = 0
    cdef long long a, b
    for i in range(n):
        while top >= 2:
            a = hull[top - 2]
            b = hull[top - 1]
            if (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]) <= 0.0:
                top -= 1
            else:
                break
        hull[top] = i
        top += 1
    return out[:top].copy()


def holder_sup_uniform(y, double h, double alpha):
    cdef const double[::1] v = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t d, i
    cdef double best = 0.0, top, inv, q
    for d in range(1, n):
        top = 0.0
        for i in range(n - d):
            q = fabs(v[i + d] - v[i])
            if q > top:
                top = q
        inv = 1.0 / pow(d * h, alpha)
        if top * inv > best:
            best = top * inv
    return best


cdef Py_ssize_t _search(double* tails, Py_ssize_t size, double val, bint strict) noexcept nogil:
    # first position with tails[pos] >= val (strict) or > val (non-strict)
    cdef Py_ssize_t lo = 0, hi = size, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if tails[mid] < val or (not strict and tails[mid] == val):
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef void _end_lengths(const double* v, Py_ssize_t n, bint strict, bint reverse_negate,
                       double* tails, long long* out) noexcept nogil:
    cdef Py_ssize_t i, pos, size = 0
    cdef double val
    for i in range(n):
        if reverse_negate:
            val = -v[n - 1 - i]
        else:
            val = v[i]
        pos = _search(tails, size, val, strict)
        tails[pos] = val
        if pos == size:
            size += 1
        if reverse_negate:
            out[n - 1 - i] = pos + 1
        else:
            out[i] = pos + 1


def lis_length(v, bint strict=False):
    cdef const double[::1] vals = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t n = vals.shape[0]
    if n == 0:
        return 0
    tails_arr = np.empty(n, dtype=np.float64)
    lens_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] tails = tails_arr
    cdef long long[::1] lens = lens_arr
    _end_lengths(&vals[0], n, strict, False, &tails[0], &lens[0])
    return int(lens_arr.max())


def lis_indices(v, bint strict=False):
    cdef const double[::1] vals = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t n = vals.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    tails_arr = np.empty(n, dtype=np.float64)
    start_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] tails = tails_arr
    cdef long long[::1] start = start_arr
    _end_lengths(&vals[0], n, strict, True, &tails[0], &start[0])
    cdef long long need = start_arr.max()
    out = np.empty(need, dtype=np.int64)
    cdef long long[::1] picked = out
    cdef Py_ssize_t i, k = 0
    cdef double last = 0.0
    cdef bint have = False
    for i in range(n):
        if start[i] != need:
            continue
        if have:
            if strict and not vals[i] > last:
                continue
            if not strict and not vals[i] >= last:
                continue
        picked[k] = i
        k += 1
        last = vals[i]
        have = True
        need -= 1
        if need == 0:
            break
    return out


def convex_chain(x, y, double tol=0.0, bint strict=False):
    cdef const double[::1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] ys = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t m = xs.shape[0]
    if m <= 2:
        return np.arange(m, dtype=np.int64)
    dp_arr = np.full((m, m), 2, dtype=np.int16)
    par_arr = np.full((m, m), -1, dtype=np.int16)
    cdef short[:, ::1] dp = dp_arr
    cdef short[:, ::1] parent = par_arr
    s_in_arr = np.empty(m, dtype=np.float64)
    s_sorted_arr = np.empty(m, dtype=np.float64)
    best_arr = np.empty(m, dtype=np.int16)
    where_arr = np.empty(m, dtype=np.int64)
    cdef double[::1] s_in = s_in_arr
    cdef double[::1] s_sorted = s_sorted_arr
    cdef short[::1] best = best_arr
    cdef long long[::1] where = where_arr
    cdef long long[::1] order
    cdef Py_ssize_t i, j, k, t, lo, hi, mid
    cdef double thr, s_out
    cdef short cur, cand
    for i in range(1, m - 1):
        for k in range(i):
            s_in[k] = (ys[i] - ys[k]) / (xs[i] - xs[k])
        order = np.argsort(s_in_arr[:i], kind="stable").astype(np.int64)
        cur = -1
        for t in range(i):
            k = order[t]
            s_sorted[t] = s_in[k]
            if dp[k, i] > cur:
                cur = dp[k, i]
                where[t] = k
            else:
                where[t] = where[t - 1]
            best[t] = cur
        for j in range(i + 1, m):
            s_out = (ys[j] - ys[i]) / (xs[j] - xs[i])
            thr = s_out + tol
            lo = 0
            hi = i
            while lo < hi:
                mid = (lo + hi) // 2
                if s_sorted[mid] < thr or (not strict and s_sorted[mid] == thr):
                    lo = mid + 1
                else:
                    hi = mid
            if lo == 0:
                continue
            cand = best[lo - 1] + 1
            if cand > dp[i, j]:
                dp[i, j] = cand
                parent[i, j] = <short>where[lo - 1]
    flat = np.triu(dp_arr, 1).argmax()
    i, j = divmod(int(flat), m)
    chain = [j, i]
    while parent[i, j] >= 0:
        k = parent[i, j]
        chain.append(k)
        j = i
        i = k
    return np.asarray(chain[::-1], dtype=np.int64)
