"""Divided differences, n-convexity on finite point sets, and homogeneous subsets.

The colouring used throughout: an (n+1)-tuple is POS when its n-th divided
difference exceeds tol_dd, NEG when it is below −tol_dd, and neutral (in
neither class) otherwise, with tol_dd = 1e−10·(1 + max|y|)·(max x − min x)^−n.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._backend import kernels


class Sign(str, enum.Enum):
    POS = "POS"
    NEG = "NEG"


def _check_points(xs, ys, min_len=1):
    xs = np.asarray(xs, dtype=np.float64).ravel()
    ys = np.asarray(ys, dtype=np.float64).ravel()
    if xs.shape != ys.shape:
        raise ValueError("xs and ys must have the same length")
    if xs.shape[0] < min_len:
        raise ValueError(f"need at least {min_len} points, got {xs.shape[0]}")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("abscissae must be strictly increasing (distinct and sorted)")
    return xs, ys


@dataclass(frozen=True, eq=False)
class DividedDifferenceTable:
    """table[r][i] = f[x_i, …, x_{i+r}]; row r has len(xs) − r entries."""

    xs: np.ndarray
    table: tuple

    def entry(self, i: int, r: int) -> float:
        return float(self.table[r][i])

    @property
    def size(self) -> int:
        return self.xs.shape[0]

    def order(self, r: int) -> np.ndarray:
        """All r-th divided differences over consecutive windows."""
        return self.table[r]

    def to_dict(self) -> dict:
        return {"xs": self.xs.tolist(), "table": [row.tolist() for row in self.table]}


def build_table(xs, ys) -> DividedDifferenceTable:
    """Newton's triangular table by the recursion (i, r) = ((i+1, r−1) − (i, r−1)) / (x_{i+r} − x_i)."""
    xs, ys = _check_points(xs, ys)
    rows = [ys.copy()]
    for r in range(1, xs.shape[0]):
        prev = rows[-1]
        rows.append((prev[1:] - prev[:-1]) / (xs[r:] - xs[:-r]))
    for row in rows:
        row.setflags(write=False)
    xs = xs.copy()
    xs.setflags(write=False)
    return DividedDifferenceTable(xs, tuple(rows))


def divided_difference(xs, ys) -> float:
    """f[x_0, …, x_m] by the recursion."""
    t = build_table(xs, ys)
    return t.entry(0, t.size - 1)


def symmetric_form(xs, ys) -> float:
    """Σ_i f(x_i) / ∏_{j≠i} (x_i − x_j); independent of the order of the points."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    diff = xs[:, None] - xs[None, :]
    np.fill_diagonal(diff, 1.0)
    return float(np.sum(ys / np.prod(diff, axis=1)))


def dd_tolerance(xs, ys, order: int) -> float:
    xs = np.asarray(xs, dtype=np.float64)
    span = float(xs.max() - xs.min())
    return 1e-10 * (1.0 + float(np.max(np.abs(ys)))) * span ** (-order)


def is_n_convex(xs, ys, order: int, sign: Sign = Sign.POS, tol: float | None = None) -> bool:
    """All consecutive (order+1)-windows have order-th divided difference > tol (POS) or < −tol (NEG)."""
    if order < 1:
        raise ValueError("order must be at least 1")
    xs, ys = _check_points(xs, ys)
    if xs.shape[0] < order + 1:
        raise ValueError(f"need at least {order + 1} points for order {order}")
    sign = Sign(sign)
    if tol is None:
        tol = dd_tolerance(xs, ys, order)
    d = build_table(xs, ys).order(order)
    return bool(np.all(d > tol)) if sign is Sign.POS else bool(np.all(d < -tol))


def is_n_convex_all_windows(xs, ys, order: int, sign: Sign = Sign.POS, tol: float | None = None) -> bool:
    """Brute-force check over every (order+1)-subset; exponential, for verification only."""
    from itertools import combinations

    xs, ys = _check_points(xs, ys, order + 1)
    sign = Sign(sign)
    if tol is None:
        tol = dd_tolerance(xs, ys, order)
    for c in combinations(range(xs.shape[0]), order + 1):
        c = list(c)
        v = divided_difference(xs[c], ys[c])
        if (sign is Sign.POS and not v > tol) or (sign is Sign.NEG and not v < -tol):
            return False
    return True


@dataclass(frozen=True)
class HomogeneousResult:
    indices: tuple
    sign: Sign | None
    exact: bool

    def __len__(self):
        return len(self.indices)

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "sign": None if self.sign is None else self.sign.value,
            "exact": self.exact,
            "size": len(self.indices),
        }


def _window_ok(xs, ys, chosen, order, tol, pos):
    w = chosen[-(order + 1):]
    v = divided_difference(xs[w], ys[w])
    return v > tol if pos else v < -tol


def _exact_search(xs, ys, order, tol, pos):
    """Largest index set whose consecutive windows all have the requested colour.

    Depth-first over subsets in lexicographic order, pruned by the number of
    remaining points; the first maximum found is the lexicographically
    smallest one.
    """
    m = xs.shape[0]
    best = []

    def dfs(chosen, start):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        for j in range(start, m):
            if len(chosen) + (m - j) <= len(best):
                return
            chosen.append(j)
            if len(chosen) <= order or _window_ok(xs, ys, chosen, order, tol, pos):
                dfs(chosen, j + 1)
            chosen.pop()

    dfs([], 0)
    return best


def _greedy(xs, ys, order, tol, pos):
    chosen = []
    for j in range(xs.shape[0]):
        chosen.append(j)
        if len(chosen) > order and not _window_ok(xs, ys, chosen, order, tol, pos):
            chosen.pop()
    return chosen


def _fast(xs, ys, order, tol, pos):
    # subtracting tol·x^order lowers every order-th divided difference by exactly tol,
    # so "dd > tol" becomes "shifted dd > 0" and the exact chain DPs apply
    s = 1.0 if pos else -1.0
    if order == 1:
        z = s * ys - tol * xs
        return kernels.lis_indices(z, True).tolist()
    z = s * ys - tol * xs * xs
    return kernels.convex_chain(xs, z, 0.0, True).tolist()


def largest_homogeneous_subset(xs, ys, order: int, max_exact: int = 16,
                               tol: float | None = None) -> HomogeneousResult:
    """Largest subset on which all consecutive order-th divided differences share one strict sign.

    Up to ``max_exact`` points: exhaustive search over both signs.  Above it,
    order 1 uses longest strictly increasing / decreasing subsequences and
    order 2 the longest strictly convex / concave chain, both exact; higher
    orders use a left-to-right greedy and report ``exact=False``.  Among
    equally large answers the lexicographically smallest index tuple wins,
    then POS before NEG.  If no (order+1)-tuple is coloured the result has
    ``order`` points and sign ``None``.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    xs, ys = _check_points(xs, ys)
    m = xs.shape[0]
    if m < order + 1:
        raise ValueError(f"need at least {order + 1} points for order {order}")
    if tol is None:
        tol = dd_tolerance(xs, ys, order)
    if m <= max_exact:
        search, exact = _exact_search, True
    elif order <= 2:
        search, exact = _fast, True
    else:
        search, exact = _greedy, False
    cands = []
    for sign in (Sign.POS, Sign.NEG):
        idx = search(xs, ys, order, tol, sign is Sign.POS)
        cands.append((-len(idx), tuple(idx), 0 if sign is Sign.POS else 1, sign))
    cands.sort(key=lambda c: c[:3])
    _, idx, _, sign = cands[0]
    if len(idx) <= order:
        idx, sign = tuple(range(order)), None
    return HomogeneousResult(tuple(int(i) for i in idx), sign, exact)
