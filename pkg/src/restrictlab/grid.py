"""Functions sampled on the uniform grid x_i = i / (n - 1) of [0, 1].

Everything else in the package is built on two value types defined here,
:class:`SampledFunction` and :class:`GridSubset`, plus a small discrete
calculus (Hölder seminorm, trapezoid antiderivative, central-difference
derivative) and the CSV / index-list formats used by the command line.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from ._backend import kernels

# above this many points the seminorm may be computed on a strided sub-grid
SUBSAMPLE_LIMIT = 2 ** 13


@dataclass(frozen=True)
class FunctionMeta:
    """Provenance of a sampled function."""

    generator: str = "user"
    seed: Optional[int] = None
    holder_alpha: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.seed is not None and not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.holder_alpha is not None and self.holder_alpha < 0:
            raise ValueError(f"holder_alpha must be nonnegative, got {self.holder_alpha}")

    def to_dict(self) -> dict:
        return {
            "generator": self.generator,
            "seed": None if self.seed is None else int(self.seed),
            "holder_alpha": self.holder_alpha,
            "extra": dict(self.extra),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionMeta":
        return cls(
            generator=d.get("generator", "user"),
            seed=d.get("seed"),
            holder_alpha=d.get("holder_alpha"),
            extra=dict(d.get("extra") or {}),
        )


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values of a real function on the uniform grid of [0, 1].

    The value array is copied and made read-only on construction.
    """

    values: np.ndarray
    meta: FunctionMeta = field(default_factory=FunctionMeta)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True).ravel()
        if v.shape[0] < 2:
            raise ValueError(f"need at least 2 grid points, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_points(self) -> int:
        return self.values.shape[0]

    @property
    def step(self) -> float:
        return 1.0 / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return grid_points(self.n_points)

    @classmethod
    def from_callable(cls, func, n_points: int, meta: FunctionMeta | None = None) -> "SampledFunction":
        return cls(func(grid_points(n_points)), meta or FunctionMeta())

    def with_values(self, values, **meta_changes) -> "SampledFunction":
        return SampledFunction(values, replace(self.meta, **meta_changes))

    def __len__(self):
        return self.n_points


@dataclass(frozen=True, eq=False)
class GridSubset:
    """A set of grid indices of a parent grid with ``parent_n`` points."""

    parent_n: int
    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        if int(self.parent_n) < 1:
            raise ValueError(f"parent_n must be positive, got {self.parent_n}")
        idx = np.array(self.indices, dtype=np.int64, copy=True).ravel()
        if idx.size:
            if idx[0] < 0 or idx[-1] > self.parent_n - 1:
                raise ValueError("subset indices out of range")
            if np.any(np.diff(idx) <= 0):
                raise ValueError("subset indices must be strictly increasing")
        idx.setflags(write=False)
        object.__setattr__(self, "parent_n", int(self.parent_n))
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_mask(cls, mask) -> "GridSubset":
        mask = np.asarray(mask, dtype=bool)
        return cls(mask.shape[0], np.flatnonzero(mask))

    @classmethod
    def full(cls, n: int) -> "GridSubset":
        return cls(n, np.arange(n))

    @property
    def x(self) -> np.ndarray:
        if self.parent_n == 1:
            return np.zeros(self.indices.shape[0])
        return self.indices / (self.parent_n - 1)

    def __len__(self):
        return self.indices.shape[0]

    def __contains__(self, i):
        pos = np.searchsorted(self.indices, i)
        return bool(pos < len(self) and self.indices[pos] == i)

    def issubset(self, other: "GridSubset") -> bool:
        return self.parent_n == other.parent_n and bool(np.all(np.isin(self.indices, other.indices)))


def grid_points(n_points: int) -> np.ndarray:
    """x_i = i / (n_points - 1), computed as an exact quotient per point."""
    if n_points < 2:
        raise ValueError("grid needs at least 2 points")
    return np.arange(n_points) / (n_points - 1)


def holder_seminorm(f: SampledFunction, alpha: float, subsample: bool = False) -> float:
    """Discrete α-Hölder seminorm: max over grid pairs of |f(x) - f(y)| / |x - y|^α.

    This only sees grid pairs, so it never exceeds the true seminorm.  With
    ``subsample=True`` and more than 2^13 points the maximum is taken over a
    strided sub-grid (always keeping both endpoints) so that at most about
    2^26 pairs are examined.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    y = f.values
    h = f.step
    if subsample and f.n_points > SUBSAMPLE_LIMIT:
        stride = math.ceil((f.n_points - 1) / SUBSAMPLE_LIMIT)
        if (f.n_points - 1) % stride:
            # endpoint is not on the strided grid; fall back to the general pair scan
            idx = np.unique(np.r_[np.arange(0, f.n_points, stride), f.n_points - 1])
            return _holder_pairs(idx * h, y[idx], alpha)
        y = y[::stride]
        h = h * stride
    return float(kernels.holder_sup_uniform(y, h, alpha))


def _holder_pairs(x, y, alpha):
    best = 0.0
    for i in range(len(x) - 1):
        q = np.max(np.abs(y[i + 1:] - y[i]) / (x[i + 1:] - x[i]) ** alpha)
        best = max(best, q)
    return float(best)


def antiderivative(f: SampledFunction) -> SampledFunction:
    """F(x_i) = ∫_0^{x_i} f by the cumulative trapezoid rule, F(0) = 0.

    Exact for piecewise-linear f whose corners sit on grid points.  The
    claimed Hölder exponent, when known, goes up by one.
    """
    v = f.values
    F = np.empty_like(v)
    F[0] = 0.0
    np.cumsum(0.5 * (v[1:] + v[:-1]), out=F[1:])
    F /= f.n_points - 1
    alpha = None if f.meta.holder_alpha is None else f.meta.holder_alpha + 1.0
    meta = replace(f.meta, generator=f"int({f.meta.generator})", holder_alpha=alpha)
    return SampledFunction(F, meta)


def finite_diff_derivative(f: SampledFunction) -> SampledFunction:
    """Central differences at interior points, one-sided at the two ends."""
    if f.n_points < 3:
        raise ValueError("finite-difference derivative needs at least 3 points")
    d = np.gradient(f.values, f.step, edge_order=1)
    a = f.meta.holder_alpha
    alpha = a - 1.0 if a is not None and a >= 1.0 else None
    meta = replace(f.meta, generator=f"d({f.meta.generator})", holder_alpha=alpha)
    return SampledFunction(d, meta)


def restrict_values(f: SampledFunction, A: GridSubset) -> tuple[np.ndarray, np.ndarray]:
    """Abscissae and values of f on A, in index order."""
    if A.parent_n != f.n_points:
        raise ValueError(f"subset belongs to a grid of {A.parent_n} points, function has {f.n_points}")
    return A.indices / (f.n_points - 1), f.values[A.indices].copy()


# ---------------------------------------------------------------- file formats

def _meta_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


def write_function_csv(f: SampledFunction, path, meta_sidecar: bool = True) -> None:
    """CSV with header ``x,value``; provenance goes to ``<path>.meta.json``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(function_csv_text(f))
    if meta_sidecar:
        _meta_path(path).write_text(json.dumps(f.meta.to_dict(), indent=2, sort_keys=True) + "\n")


def function_csv_text(f: SampledFunction) -> str:
    lines = ["x,value"]
    lines.extend(f"{x!r},{v!r}" for x, v in zip(f.x.tolist(), f.values.tolist()))
    return "\n".join(lines) + "\n"


def read_function_csv(path) -> SampledFunction:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["x", "value"]:
        raise ValueError(f"{path}: expected header 'x,value'")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]], dtype=np.float64)
    if data.shape[0] < 2:
        raise ValueError(f"{path}: need at least 2 rows")
    n = data.shape[0]
    if not np.allclose(data[:, 0], grid_points(n), rtol=0, atol=1e-12):
        raise ValueError(f"{path}: abscissae are not the uniform grid i/(n-1)")
    meta = FunctionMeta()
    side = _meta_path(path)
    if side.exists():
        meta = FunctionMeta.from_dict(json.loads(side.read_text()))
    return SampledFunction(data[:, 1], meta)


def write_subset(A: GridSubset, path) -> None:
    Path(path).write_text(subset_text(A))


def subset_text(A: GridSubset) -> str:
    body = "".join(f"{i}\n" for i in A.indices.tolist())
    return f"# parent_n={A.parent_n}\n" + body


def read_subset(path, parent_n: int | None = None) -> GridSubset:
    """Newline-delimited indices; an optional ``# parent_n=N`` header line."""
    n = parent_n
    idx = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            if key.strip() == "parent_n" and n is None:
                n = int(val)
            continue
        idx.append(int(line))
    if n is None:
        raise ValueError(f"{path}: parent grid size unknown (no '# parent_n=' header)")
    return GridSubset(n, idx)
