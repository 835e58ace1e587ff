"""Test functions: fractional Brownian motion, sawtooth families, perturbations, Cantor sets.

All generators are deterministic functions of their parameters and seed and
draw from a private ``numpy.random.Generator``; there is no global RNG state.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .grid import FunctionMeta, GridSubset, SampledFunction, antiderivative, grid_points

CHOLESKY_MAX = 2 ** 11


def _is_pow2(m: int) -> bool:
    return m >= 1 and m & (m - 1) == 0


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


@dataclass(frozen=True)
class FbmParams:
    hurst: float
    n_points: int
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if int(self.n_points) < 2:
            raise ValueError("n_points must be at least 2")
        object.__setattr__(self, "seed", _check_seed(self.seed))


def fgn_autocovariance(hurst: float, n_lags: int) -> np.ndarray:
    """γ(k) = ½(|k+1|^{2H} + |k−1|^{2H} − 2|k|^{2H}) for unit-step fractional Gaussian noise."""
    k = np.arange(n_lags, dtype=np.float64)
    e = 2.0 * hurst
    return 0.5 * ((k + 1.0) ** e + np.abs(k - 1.0) ** e - 2.0 * k ** e)


def _fgn_circulant(hurst, n_steps, rng):
    # Davies-Harte: embed the Toeplitz covariance in a circulant of size 2N
    g = fgn_autocovariance(hurst, n_steps + 1)
    c = np.concatenate([g, g[-2:0:-1]])
    lam = np.fft.fft(c).real
    if lam.min() < -1e-10 * lam.max():
        return None
    m = c.shape[0]
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    w = np.fft.fft(np.sqrt(np.maximum(lam, 0.0) / m) * z)
    return w.real[:n_steps]


def _fgn_cholesky(hurst, n_steps, rng):
    g = fgn_autocovariance(hurst, n_steps)
    idx = np.arange(n_steps)
    cov = g[np.abs(idx[:, None] - idx[None, :])]
    L = np.linalg.cholesky(cov)
    return L @ rng.standard_normal(n_steps)


def _fbm_from_fgn(p: FbmParams, fgn, method):
    n_steps = p.n_points - 1
    B = np.empty(p.n_points)
    B[0] = 0.0
    np.cumsum(fgn * (1.0 / n_steps) ** p.hurst, out=B[1:])
    meta = FunctionMeta("fbm", p.seed, p.hurst, {"hurst": p.hurst, "method": method})
    return SampledFunction(B, meta)


def fbm_path(p: FbmParams) -> SampledFunction:
    """Fractional Brownian motion on the grid, B(0) = 0.

    Increments come from circulant embedding (exact covariance, O(n log n)),
    which needs n_points − 1 to be a power of two.  If the embedding ever had
    a negative eigenvalue the Cholesky sampler takes over for small grids.
    """
    n_steps = p.n_points - 1
    if not _is_pow2(n_steps):
        raise ValueError(f"n_points - 1 must be a power of two, got n_points={p.n_points}")
    rng = np.random.default_rng(p.seed)
    fgn = _fgn_circulant(p.hurst, n_steps, rng)
    if fgn is None:
        if n_steps > CHOLESKY_MAX:
            raise RuntimeError(f"circulant embedding failed for hurst={p.hurst}, n_points={p.n_points}")
        return fbm_path_cholesky(p)
    return _fbm_from_fgn(p, fgn, "circulant")


def fbm_path_cholesky(p: FbmParams) -> SampledFunction:
    """Same law as :func:`fbm_path` via a dense Cholesky factor; O(n^3), n_points − 1 ≤ 2^11."""
    n_steps = p.n_points - 1
    if n_steps > CHOLESKY_MAX:
        raise ValueError(f"Cholesky sampler limited to {CHOLESKY_MAX + 1} points")
    rng = np.random.default_rng(p.seed)
    return _fbm_from_fgn(p, _fgn_cholesky(p.hurst, n_steps, rng), "cholesky")


def integrated_fbm(p: FbmParams) -> SampledFunction:
    """∫_0^x B for an fBm path B; lies in C^{1+H−}."""
    F = antiderivative(fbm_path(p))
    return F.with_values(F.values, generator="integrated_fbm")


class SawtoothMode(str, enum.Enum):
    MONOTONE_KILLER = "MONOTONE_KILLER"
    CONVEXITY_KILLER = "CONVEXITY_KILLER"


@dataclass(frozen=True)
class SawtoothParams:
    """Periodic sawtooth with period 2^-period_exp and steep piece of width 2^-tooth_exp."""

    period_exp: int
    tooth_exp: int
    depth: float
    mode: SawtoothMode = SawtoothMode.MONOTONE_KILLER

    def __post_init__(self):
        if self.period_exp < 1 or self.tooth_exp < 1:
            raise ValueError("period_exp and tooth_exp must be positive")
        if self.tooth_exp <= self.period_exp:
            raise ValueError("tooth_exp must exceed period_exp")
        if not self.depth > 0:
            raise ValueError(f"depth must be positive, got {self.depth}")
        object.__setattr__(self, "mode", SawtoothMode(self.mode))

    @property
    def period(self) -> float:
        return 2.0 ** -self.period_exp

    @property
    def tooth(self) -> float:
        return 2.0 ** -self.tooth_exp

    @property
    def long_slope(self) -> float:
        """|φ′| on the long decreasing piece."""
        return self.depth / (self.period - self.tooth)

    @property
    def short_slope(self) -> float:
        """φ′ on the short increasing piece."""
        return self.depth / self.tooth

    def n_periods(self) -> int:
        return 2 ** self.period_exp


def sawtooth(p: SawtoothParams, n_points: int) -> SampledFunction:
    """The sawtooth φ, or its antiderivative ∫_0^x φ in CONVEXITY_KILLER mode.

    φ(j·P) = 0, φ(P − w) = −depth, linear in between, where P is the period
    and w the tooth width.  Values are evaluated in closed form from integer
    grid offsets, so corners are exact.
    """
    n_steps = n_points - 1
    if n_steps < 1 or n_steps % (2 ** p.tooth_exp):
        raise ValueError(f"n_points - 1 must be divisible by 2^{p.tooth_exp}, got n_points={n_points}")
    per = n_steps >> p.period_exp          # grid steps per period
    w = n_steps >> p.tooth_exp             # grid steps per tooth
    long_ = per - w
    i = np.arange(n_points)
    k, t = np.divmod(i, per)
    d = p.depth
    on_long = t <= long_
    if p.mode is SawtoothMode.MONOTONE_KILLER:
        vals = np.where(on_long, -d * t / long_, -d * (per - t) / w)
    else:
        h = 1.0 / n_steps
        P, W, L = per * h, w * h, long_ * h
        tt = t * h
        within = np.where(
            on_long,
            -d * tt * tt / (2.0 * L),
            -d * L / 2.0 - d * (W * W - (P - tt) ** 2) / (2.0 * W),
        )
        vals = k * (-d * P / 2.0) + within
    meta = FunctionMeta(
        "sawtooth", None, None,
        {"period_exp": p.period_exp, "tooth_exp": p.tooth_exp, "depth": p.depth, "mode": p.mode.value},
    )
    return SampledFunction(vals, meta)


def smooth_base(n_points: int, amplitude: float = 0.05, tilt: float = 0.1) -> SampledFunction:
    """f(x) = amplitude·sin(2πx) + tilt·x, a C^∞ base with explicit derivative bounds.

    ``meta.extra`` records sup|f′| and sup|f″| under the keys ``xi1`` and ``xi2``.
    """
    x = grid_points(n_points)
    two_pi = 2.0 * math.pi
    xi1 = amplitude * two_pi + abs(tilt)
    xi2 = amplitude * two_pi ** 2
    meta = FunctionMeta("smooth_base", None, None,
                        {"amplitude": amplitude, "tilt": tilt, "xi1": xi1, "xi2": xi2})
    return SampledFunction(amplitude * np.sin(two_pi * x) + tilt * x, meta)


def perturb_within(f: SampledFunction, delta: float, seed: int, n_bumps: int = 6) -> SampledFunction:
    """f plus a smooth random function of sup-norm 0.9·delta (strictly below delta).

    The noise is a sum of ``n_bumps`` Gaussian bumps with random centres in
    [0, 1], widths in [0.05, 0.3] and signed amplitudes.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    seed = _check_seed(seed)
    rng = np.random.default_rng(seed)
    centres = rng.uniform(0.0, 1.0, n_bumps)
    widths = rng.uniform(0.05, 0.3, n_bumps)
    amps = rng.standard_normal(n_bumps)
    x = f.x
    noise = np.zeros(f.n_points)
    for c, s, a in zip(centres, widths, amps):
        noise += a * np.exp(-0.5 * ((x - c) / s) ** 2)
    noise *= 0.9 * delta / np.max(np.abs(noise))
    out = f.values + noise
    while np.max(np.abs(out - f.values)) >= delta:
        # rounding in f + noise can only matter when delta is near machine precision
        noise *= 0.5
        out = f.values + noise
    extra = dict(f.meta.extra, perturb_delta=delta, perturb_seed=seed)
    return f.with_values(out, extra=extra)


def cantor_prefix(level: int, n_points: int) -> GridSubset:
    """Grid points strictly inside the 2^level intervals of the level-``level`` Cantor construction.

    Needs (n_points − 1) divisible by 3^level with at least two grid steps per
    surviving interval.  Keeping only interior points means no point sits on a
    3-adic cell boundary of level ≤ ``level``, so the closed-cell counts are
    exactly 2^ℓ.
    """
    if level < 1:
        raise ValueError("level must be positive")
    n_steps = n_points - 1
    span = 3 ** level
    if n_steps % span:
        raise ValueError(f"n_points - 1 must be divisible by 3^{level}, got n_points={n_points}")
    r = n_steps // span
    if r < 2:
        raise ValueError("need at least two grid steps per surviving interval")
    starts = np.zeros(1, dtype=np.int64)
    for _ in range(level):
        starts = np.concatenate([3 * starts, 3 * starts + 2])
    starts = np.sort(starts) * r
    idx = (starts[:, None] + np.arange(1, r)[None, :]).ravel()
    return GridSubset(n_points, idx)


def quadratic(xi: float, n_points: int) -> SampledFunction:
    """f0(x) = (xi/2)·x², so f0″ ≡ xi."""
    if not xi > 0:
        raise ValueError(f"xi must be positive, got {xi}")
    x = grid_points(n_points)
    return SampledFunction(0.5 * xi * x * x, FunctionMeta("quadratic", None, None, {"xi": xi}))
