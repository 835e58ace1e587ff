"""Box counting on k-adic cells and windowed regression estimates of box dimension.

Cells at level ℓ are the closed intervals [(j−1)/k^ℓ, j/k^ℓ], j = 1..k^ℓ.  A
grid point on a shared cell boundary meets both neighbours.  Counting is
exact integer arithmetic on grid indices, no floating point is involved.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import GridSubset

MIN_WINDOW = 4
SATURATION = 0.9


@dataclass(frozen=True, eq=False)
class BoxCountProfile:
    """N_{k,ℓ}(A) for ℓ = 1..ell_max.

    ``capacity[ℓ]`` is the number of (point, cell) incidences at level ℓ, the
    count a set of this size would reach once every point has its own cells.
    """

    base_k: int
    levels: np.ndarray
    counts: np.ndarray
    capacity: np.ndarray
    n_set: int

    def __post_init__(self):
        for name in ("levels", "counts", "capacity"):
            a = np.asarray(getattr(self, name), dtype=np.int64).copy()
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.base_k < 2:
            raise ValueError("base_k must be at least 2")
        if np.any(np.diff(self.counts) < 0):
            raise ValueError("box counts must be nondecreasing in ell")
        if np.any(self.counts > 2 * max(self.n_set, 1)):
            raise ValueError("box count exceeds twice the set size")

    def csv_text(self) -> str:
        rows = ["ell,count"] + [f"{l},{c}" for l, c in zip(self.levels.tolist(), self.counts.tolist())]
        return "\n".join(rows) + "\n"

    def write_csv(self, path) -> None:
        Path(path).write_text(self.csv_text())


def cells_touched(indices, n_steps: int, n_cells: int) -> np.ndarray:
    """Cell numbers j in 1..n_cells of every (point, cell) incidence, unsorted, with repeats."""
    idx = np.asarray(indices, dtype=np.int64)
    q, r = np.divmod(idx * n_cells, n_steps)
    on_edge = r == 0
    cells = np.concatenate([np.where(on_edge, q, q + 1), q[on_edge] + 1])
    return cells[(cells >= 1) & (cells <= n_cells)]


def box_counts(A: GridSubset, base_k: int, ell_max: int) -> BoxCountProfile:
    """N_{k,ℓ}(A) for ℓ = 1..ell_max; needs k^ell_max ≤ parent_n − 1."""
    if base_k < 2:
        raise ValueError("base_k must be at least 2")
    if ell_max < 1:
        raise ValueError("ell_max must be at least 1")
    n_steps = A.parent_n - 1
    if base_k ** ell_max > n_steps:
        raise ValueError(
            f"cells at level {ell_max} (k^ell = {base_k ** ell_max}) are finer than the grid step 1/{n_steps}")
    counts, cap = [], []
    for ell in range(1, ell_max + 1):
        cells = cells_touched(A.indices, n_steps, base_k ** ell)
        counts.append(np.unique(cells).shape[0])
        cap.append(cells.shape[0])
    return BoxCountProfile(base_k, np.arange(1, ell_max + 1), counts, cap, len(A))


def max_level(parent_n: int, base_k: int) -> int:
    """Largest ℓ with k^ℓ ≤ parent_n − 1."""
    ell, n_steps = 0, parent_n - 1
    while base_k ** (ell + 1) <= n_steps:
        ell += 1
    return ell


@dataclass(frozen=True)
class DimensionEstimate:
    lower_est: float
    upper_est: float
    fit_window: tuple
    r_squared: float
    n_levels_used: int
    full_slope: float = float("nan")

    def to_dict(self) -> dict:
        def clean(v):
            return None if isinstance(v, float) and math.isnan(v) else v
        return {
            "lower_est": self.lower_est,
            "upper_est": self.upper_est,
            "fit_window": list(self.fit_window),
            "r_squared": clean(self.r_squared),
            "n_levels_used": self.n_levels_used,
            "full_slope": clean(self.full_slope),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _slope_r2(x, y):
    xm = x - x.mean()
    ym = y - y.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ ym) / sxx
    syy = float(ym @ ym)
    r2 = 1.0 if syy == 0.0 else slope * slope * sxx / syy
    return slope, r2


def usable_run(profile: BoxCountProfile, saturation: float = SATURATION) -> tuple[int, int]:
    """Half-open positional range of the longest run of unsaturated levels (ties go deeper)."""
    ok = profile.counts < saturation * profile.capacity
    best = (0, 0)
    start = None
    for i, flag in enumerate(list(ok) + [False]):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start >= best[1] - best[0]:
                best = (start, i)
            start = None
    return best


def estimate_dimension(profile: BoxCountProfile, min_window: int = MIN_WINDOW,
                       saturation: float = SATURATION) -> DimensionEstimate:
    """Upper and lower box-dimension estimates from a count profile.

    Levels whose count has reached ``saturation`` times the incidence capacity
    are dropped and the longest remaining run of consecutive levels is kept.
    log N is regressed on ℓ·log k over every window of at least
    ``min_window`` levels that ends at the deepest kept level; the largest
    slope is the upper estimate and the smallest the lower one, both clamped
    to [0, 1].  R² is that of the fit over the whole kept run.  Sets with at
    most one point have dimension 0.
    """
    if profile.n_set <= 1:
        return DimensionEstimate(0.0, 0.0, (0, 0), float("nan"), 0, 0.0)
    lo, hi = usable_run(profile, saturation)
    if hi - lo < min_window:
        raise ValueError(f"too few levels: {hi - lo} usable, need {min_window}")
    x = profile.levels[lo:hi] * math.log(profile.base_k)
    y = np.log(profile.counts[lo:hi].astype(np.float64))
    slopes = [_slope_r2(x[a:], y[a:])[0] for a in range(0, hi - lo - min_window + 1)]
    full, r2 = _slope_r2(x, y)
    up = min(max(max(slopes), 0.0), 1.0)
    low = min(max(min(slopes), 0.0), 1.0)
    return DimensionEstimate(low, up, (int(profile.levels[lo]), int(profile.levels[hi - 1])), r2, hi - lo, full)


def min_cover_count(x, width: float) -> int:
    """Fewest closed cells [(j−1)·width, j·width] needed to cover the points x.

    Greedy from the left, always opening the cell that reaches furthest.
    """
    t = np.sort(np.asarray(x, dtype=np.float64)) / width
    count = 0
    right = -math.inf
    for v in t.tolist():
        if v <= right:
            continue
        count += 1
        right = math.floor(v) + 1.0
    return count


def min_cover_count_indices(indices, n_steps: int, cells_per_unit: int) -> int:
    """:func:`min_cover_count` on grid indices, exactly, for cells of width 1/cells_per_unit."""
    idx = np.sort(np.asarray(indices, dtype=np.int64))
    count = 0
    right = -1   # right edge of the last opened cell, in units of 1/(n_steps*cells_per_unit)
    for i in (idx * cells_per_unit).tolist():
        if i <= right:
            continue
        count += 1
        right = (i // n_steps + 1) * n_steps
    return count
