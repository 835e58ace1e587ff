"""Subsets on which a sampled function is monotone or convex.

Record sets (running maximum), contact sets of the convex minorant or
concave majorant, the convex-to-monotone transfer, and exact longest
monotone / convex subsets as baselines and certifiers.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .grid import GridSubset, SampledFunction, finite_diff_derivative

CONVEX_WINDOW_MAX = 4096


class HullMode(str, enum.Enum):
    LOWER_CONVEX = "LOWER_CONVEX"
    UPPER_CONCAVE = "UPPER_CONCAVE"


class Direction(str, enum.Enum):
    INC = "INC"
    DEC = "DEC"


class ConvexMode(str, enum.Enum):
    CONVEX = "CONVEX"
    CONCAVE = "CONCAVE"


def value_tolerance(values, rel: float = 1e-9) -> float:
    """rel·(1 + max|f|): the absolute slack used for contact detection."""
    return rel * (1.0 + float(np.max(np.abs(values)))) if len(values) else rel


def record_set(f: SampledFunction, tol: float | None = None) -> GridSubset:
    """{i : f(x_i) ≥ max_{j ≤ i} f(x_j) − tol}; index 0 is always included.

    The default tolerance is 1e−12·(1 + max|f|).
    """
    v = f.values
    if tol is None:
        tol = value_tolerance(v, 1e-12)
    run = np.maximum.accumulate(v)
    return GridSubset.from_mask(v >= run - tol)


@dataclass(frozen=True, eq=False)
class MinorantResult:
    f: SampledFunction
    g: SampledFunction
    contact: GridSubset
    max_gap: float
    mode: HullMode = HullMode.LOWER_CONVEX
    n_vertices: int = 0

    def csv_text(self) -> str:
        mask = np.zeros(self.f.n_points, dtype=bool)
        mask[self.contact.indices] = True
        rows = ["x,f,g,is_contact"]
        for x, a, b, c in zip(self.f.x.tolist(), self.f.values.tolist(), self.g.values.tolist(), mask.tolist()):
            rows.append(f"{x!r},{a!r},{b!r},{int(c)}")
        return "\n".join(rows) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())


def convex_minorant(f: SampledFunction, mode: HullMode = HullMode.LOWER_CONVEX,
                    tol: float | None = None) -> MinorantResult:
    """Convex minorant (lower hull) or concave majorant (upper hull) of the samples.

    g is linear between consecutive hull vertices.  The contact set is the
    hull vertices together with every grid point within ``tol`` of g, default
    1e−9·(1 + max|f|), so collinear touching points are included.
    """
    mode = HullMode(mode)
    sgn = 1.0 if mode is HullMode.LOWER_CONVEX else -1.0
    y = sgn * f.values
    x = f.x
    hull = kernels.lower_hull(x, y)
    g = np.interp(x, x[hull], y[hull])
    if tol is None:
        tol = value_tolerance(f.values)
    mask = (y - g) <= tol
    mask[hull] = True
    contact = GridSubset.from_mask(mask)
    gap = float(np.max(np.diff(contact.x))) if len(contact) > 1 else 0.0
    g_fn = f.with_values(sgn * g, generator=f"{mode.value.lower()}({f.meta.generator})", holder_alpha=None)
    return MinorantResult(f, g_fn, contact, gap, mode, int(hull.shape[0]))


def chord_slopes(xs, ys) -> np.ndarray:
    return np.diff(ys) / np.diff(xs)


def is_convex_on(f: SampledFunction, A: GridSubset, tol: float | None = None) -> bool:
    """Consecutive chord slopes of f|_A nondecreasing up to value noise ``tol``.

    A value error of at most ``tol`` at each point moves the slope difference
    at a middle point by at most 2·tol·(1/Δx_left + 1/Δx_right); that is the
    slack allowed.  Default ``tol`` is 1e−9·(1 + max|f|).
    """
    if len(A) < 3:
        return True
    if tol is None:
        tol = value_tolerance(f.values)
    xs = A.x
    ys = f.values[A.indices]
    dx = np.diff(xs)
    s = np.diff(ys) / dx
    slack = 2.0 * tol * (1.0 / dx[:-1] + 1.0 / dx[1:])
    return bool(np.all(np.diff(s) >= -slack))


def convex_to_monotone(f: SampledFunction, A: GridSubset, tol: float | None = None) -> GridSubset:
    """Mean-value transfer from a set where f is convex to a set where f′ is monotone.

    For each pair b < c of consecutive points of A one representative is
    chosen: the grid index strictly between them whose finite-difference
    derivative is closest to the chord slope (f(c) − f(b))/(x_c − x_b), ties
    to the smaller index; when b and c are adjacent grid points, b itself.
    The result has |A| − 1 points and interleaves A, so every dyadic cell
    that meets B lies next to a cell meeting A and vice versa, which gives
    N_{2,ℓ}(A) ≤ 3·N_{2,ℓ}(B).
    """
    if A.parent_n != f.n_points:
        raise ValueError(f"subset belongs to a grid of {A.parent_n} points, function has {f.n_points}")
    if not is_convex_on(f, A, tol):
        raise ValueError("f restricted to A is not convex")
    if len(A) < 2:
        return GridSubset(f.n_points)
    d = finite_diff_derivative(f).values
    xs = A.x
    idx = A.indices
    s = chord_slopes(xs, f.values[idx])
    out = np.empty(len(A) - 1, dtype=np.int64)
    for k in range(len(A) - 1):
        b, c = int(idx[k]), int(idx[k + 1])
        if c - b == 1:
            out[k] = b
        else:
            out[k] = b + 1 + int(np.argmin(np.abs(d[b + 1:c] - s[k])))
    return GridSubset(f.n_points, out)


def derivative_monotone_on(f: SampledFunction, B: GridSubset, tol: float = 0.0) -> bool:
    """True when the finite-difference f′ is nondecreasing along B up to ``tol``."""
    d = finite_diff_derivative(f).values[B.indices]
    return bool(np.all(np.diff(d) >= -tol))


def longest_monotone_subset(f: SampledFunction, direction: Direction = Direction.INC) -> GridSubset:
    """A maximum subset along which f is nondecreasing (INC) or nonincreasing (DEC).

    Patience sorting, O(n log n); among maximum subsets the lexicographically
    smallest index sequence is returned.
    """
    direction = Direction(direction)
    v = f.values if direction is Direction.INC else -f.values
    return GridSubset(f.n_points, kernels.lis_indices(v, False))


def convex_slope_tolerance(ys, span: float) -> float:
    """Slope-form slack tol_dd·span with tol_dd = 1e−10·(1 + max|y|)·span^−2."""
    return 1e-10 * (1.0 + float(np.max(np.abs(ys)))) / span


def longest_convex_subset(f: SampledFunction, lo: int, hi: int,
                          mode: ConvexMode = ConvexMode.CONVEX) -> GridSubset:
    """A maximum subset of the grid indices lo..hi (inclusive) on which f is convex (concave).

    Convexity is tested on consecutive chosen triples through their chord
    slopes, slope(k, i) ≤ slope(i, j) + tol, with tol from
    :func:`convex_slope_tolerance`.  Exact O(m² log m) dynamic programme over
    the last two chosen points, so the window is limited to 4097 points.
    """
    mode = ConvexMode(mode)
    lo, hi = int(lo), int(hi)
    if not 0 <= lo <= hi < f.n_points:
        raise ValueError(f"window [{lo}, {hi}] outside the grid")
    if hi - lo > CONVEX_WINDOW_MAX:
        raise ValueError(f"window of {hi - lo + 1} points exceeds the limit of {CONVEX_WINDOW_MAX + 1}")
    x = f.x[lo:hi + 1]
    y = f.values[lo:hi + 1]
    if mode is ConvexMode.CONCAVE:
        y = -y
    span = x[-1] - x[0] if hi > lo else 1.0
    chain = kernels.convex_chain(x, y, convex_slope_tolerance(y, span), False)
    return GridSubset(f.n_points, lo + chain)


def three_point_concavity_witness(f: SampledFunction, p1: int, p2: int, p3: int) -> bool:
    """True iff the second divided difference f[x_p1, x_p2, x_p3] is negative."""
    if not p1 < p2 < p3:
        raise ValueError(f"need p1 < p2 < p3, got {p1}, {p2}, {p3}")
    x = f.x
    y = f.values
    s12 = (y[p2] - y[p1]) / (x[p2] - x[p1])
    s23 = (y[p3] - y[p2]) / (x[p3] - x[p2])
    return bool((s23 - s12) / (x[p3] - x[p1]) < 0.0)


def line_witness(f: SampledFunction, p1: int, p2: int, p3: int, slope: float | None = None) -> bool:
    """Line test: f(p1) < L(p1) and f(p3) < L(p3) for the line L through (x_p2, f(p2)).

    The slope of L defaults to the finite-difference derivative at p2, the
    sampled tangent.  Success implies :func:`three_point_concavity_witness`;
    for functions that are strictly convex or strictly concave the two agree.
    """
    if not p1 < p2 < p3:
        raise ValueError(f"need p1 < p2 < p3, got {p1}, {p2}, {p3}")
    x = f.x
    y = f.values
    if slope is None:
        slope = float(np.gradient(y[max(p2 - 1, 0):p2 + 2], x[max(p2 - 1, 0):p2 + 2])[min(p2, 1)])
    L1 = y[p2] + slope * (x[p1] - x[p2])
    L3 = y[p2] + slope * (x[p3] - x[p2])
    return bool(y[p1] < L1 and y[p3] < L3)

